#!/usr/bin/env python3
"""Generate the bundled synthetic 87-bank balance-sheet CSV.

Magnitudes are in millions EUR and loosely shaped like a large-European-bank
cross section: heavy-tailed total assets, interbank books around 8-22% of the
balance sheet, equity mostly 2-10% with a handful of thin banks so that the
liquid-fraction sweep produces defaults and market-maker transitions.

Run from the repository root:

    python3 scripts/make_synthetic_eba.py
"""

import csv
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "fireclear" / "data" / "eba_synthetic.csv"
N_BANKS = 87
SEED = 2011


def main() -> None:
    rng = np.random.default_rng(SEED)
    total = np.exp(rng.normal(np.log(2.0e5), 1.1, size=N_BANKS))
    total = np.clip(total, 3.0e4, 1.2e6)

    ib_assets = total * rng.uniform(0.08, 0.22, size=N_BANKS)
    ib_liabs = total * rng.uniform(0.08, 0.22, size=N_BANKS)
    ib_liabs *= ib_assets.sum() / ib_liabs.sum()

    equity_frac = rng.uniform(0.02, 0.10, size=N_BANKS)
    thin = rng.choice(N_BANKS, size=8, replace=False)
    equity_frac[thin] = rng.uniform(0.002, 0.01, size=thin.size)
    equity = total * equity_frac

    ext_liabs = total - ib_liabs - equity
    assert np.all(ext_liabs > 0)

    OUT.parent.mkdir(parents=True, exist_ok=True)
    with OUT.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["bank_id", "total_assets", "interbank_assets", "interbank_liabilities", "external_liabilities"]
        )
        for i in range(N_BANKS):
            writer.writerow(
                [
                    f"B{i + 1:03d}",
                    f"{total[i]:.2f}",
                    f"{ib_assets[i]:.2f}",
                    f"{ib_liabs[i]:.2f}",
                    f"{ext_liabs[i]:.2f}",
                ]
            )
    print(f"wrote {OUT} ({N_BANKS} banks, total assets {total.sum():.0f}M)")


if __name__ == "__main__":
    main()
