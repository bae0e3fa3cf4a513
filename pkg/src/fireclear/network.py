"""Financial-system data model: balance sheets, relative liabilities, lattice
bounds, JSON serialization, and random network generation.

Conventions
-----------
* Banks are indexed ``0 .. n-1``.  The external ("societal") node is stored as
  column 0 of the liabilities matrix and never receives an index of its own.
* ``liabilities[i, 0]`` is bank i's obligation to the outside world and
  ``liabilities[i, j]`` for ``j >= 1`` is what bank i owes bank ``j-1``.
* All randomness goes through ``numpy.random.default_rng`` (PCG64); every
  stochastic operation takes an explicit seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDistribution, ValidationFailure

__all__ = [
    "FinancialSystem",
    "RelativeLiabilities",
    "LatticeBounds",
    "Uniform",
    "Violation",
    "validate",
    "derive_relative_liabilities",
    "lattice_bounds",
    "generate_random_system",
    "system_to_dict",
    "system_from_dict",
    "load_system",
    "dump_system",
]


def _as_float_array(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FinancialSystem:
    """Static balance-sheet data for an n-bank, m-asset system.

    liabilities : (n, n+1) matrix, column 0 external, diagonal of the
        interbank block must be zero.
    liquid : (n,) cash endowments.
    holdings : (n, m) physical units of each illiquid asset per bank.
    """

    liabilities: np.ndarray
    liquid: np.ndarray
    holdings: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "liabilities", _as_float_array(self.liabilities, "liabilities"))
        object.__setattr__(self, "liquid", _as_float_array(self.liquid, "liquid"))
        object.__setattr__(self, "holdings", _as_float_array(self.holdings, "holdings"))

    @property
    def n(self) -> int:
        return self.liquid.shape[0] if self.liquid.ndim == 1 else 0

    @property
    def m(self) -> int:
        return self.holdings.shape[1] if self.holdings.ndim == 2 else 0

    def require_valid(self) -> "FinancialSystem":
        violations = validate(self)
        if violations:
            raise ValidationFailure(violations)
        return self


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


def validate(system: FinancialSystem) -> list[Violation]:
    """Check every structural invariant and return all violations found.

    Codes: ``DimensionMismatch``, ``NonFiniteEntry``, ``NegativeEntry``,
    ``NonzeroDiagonal``.  An empty list means the system is valid.
    """
    out: list[Violation] = []
    L, x, S = system.liabilities, system.liquid, system.holdings

    if x.ndim != 1:
        out.append(Violation("DimensionMismatch", f"liquid must be a vector, got shape {x.shape}"))
        return out
    n = x.shape[0]
    if L.ndim != 2 or L.shape != (n, n + 1):
        out.append(
            Violation(
                "DimensionMismatch",
                f"liabilities must have shape ({n}, {n + 1}), got {L.shape}",
            )
        )
    if S.ndim != 2 or S.shape[0] != n:
        out.append(
            Violation("DimensionMismatch", f"holdings must have {n} rows, got shape {S.shape}")
        )

    for name, arr in (("liabilities", L), ("liquid", x), ("holdings", S)):
        if not np.all(np.isfinite(arr)):
            out.append(Violation("NonFiniteEntry", f"{name} contains NaN or infinite entries"))
        with np.errstate(invalid="ignore"):
            if np.any(arr < 0):
                idx = np.argwhere(arr < 0)[0]
                out.append(
                    Violation("NegativeEntry", f"{name} has a negative entry at index {tuple(idx)}")
                )

    if L.ndim == 2 and L.shape == (n, n + 1):
        diag = np.diagonal(L[:, 1:])
        if np.any(diag != 0):
            bad = int(np.nonzero(diag)[0][0])
            out.append(
                Violation("NonzeroDiagonal", f"bank {bad} holds a liability to itself")
            )
    return out


@dataclass(frozen=True)
class RelativeLiabilities:
    """Pro-rata repayment weights and total obligations.

    A[i, j] is the share of bank i's payments owed to bank j, a0[i] the share
    owed externally; rows with no obligations are all zero.
    """

    A: np.ndarray
    a0: np.ndarray
    pbar: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", _as_float_array(self.A, "A"))
        object.__setattr__(self, "a0", _as_float_array(self.a0, "a0"))
        object.__setattr__(self, "pbar", _as_float_array(self.pbar, "pbar"))


def derive_relative_liabilities(system: FinancialSystem) -> RelativeLiabilities:
    """Compute total obligations ``pbar = L @ 1`` and pro-rata weights."""
    L = system.liabilities
    pbar = L.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        shares = np.where(pbar[:, None] > 0, L / pbar[:, None], 0.0)
    return RelativeLiabilities(A=shares[:, 1:], a0=shares[:, 0], pbar=pbar)


@dataclass(frozen=True)
class LatticeBounds:
    """Componentwise bounds containing every clearing solution.

    Top: full payments ``pbar``, the liquidity they would generate, and the
    no-liquidation price; bottom is the origin.
    """

    p_top: np.ndarray
    q_top: np.ndarray
    M_top: np.ndarray

    @property
    def p_bot(self) -> np.ndarray:
        return np.zeros_like(self.p_top)

    @property
    def q_bot(self) -> np.ndarray:
        return np.zeros_like(self.q_top)

    @property
    def M_bot(self) -> np.ndarray:
        return np.zeros_like(self.M_top)


def lattice_bounds(system: FinancialSystem, idf) -> LatticeBounds:
    """Bounds for the payment x price x liquidity lattice.

    ``M_top = (x + A^T pbar - pbar)^+`` is the liquidity surplus under full
    payments; ``q_top`` is the price with zero liquidations at that liquidity.
    """
    rel = derive_relative_liabilities(system)
    M_top = np.maximum(system.liquid + rel.A.T @ rel.pbar - rel.pbar, 0.0)
    q_top = np.asarray(idf.price(np.zeros(system.m), M_top), dtype=float)
    return LatticeBounds(p_top=rel.pbar.copy(), q_top=q_top, M_top=M_top)


@dataclass(frozen=True)
class Uniform:
    """Uniform distribution on [low, high] for interbank liability entries."""

    low: float
    high: float

    def __post_init__(self):
        if not (np.isfinite(self.low) and np.isfinite(self.high)):
            raise InvalidDistribution("uniform bounds must be finite")
        if self.low < 0 or self.high < self.low:
            raise InvalidDistribution(
                f"uniform bounds must satisfy 0 <= low <= high, got [{self.low}, {self.high}]"
            )

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.uniform(self.low, self.high, size=size)


def generate_random_system(
    n: int,
    m: int,
    liquid,
    illiquid_units,
    external_liab,
    interbank_dist: Uniform,
    seed: int,
) -> FinancialSystem:
    """Draw a random n-bank system with i.i.d. off-diagonal interbank entries.

    ``liquid``, ``illiquid_units`` and ``external_liab`` accept scalars or
    n-vectors; each bank holds ``illiquid_units[i]`` units of every asset.
    Deterministic: identical arguments and seed give an identical system.
    """
    if n < 1 or m < 1:
        raise InvalidDistribution(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    if not isinstance(interbank_dist, Uniform):
        raise InvalidDistribution("interbank_dist must be a Uniform spec")
    rng = np.random.default_rng(seed)
    L = np.zeros((n, n + 1))
    inter = interbank_dist.sample(rng, (n, n))
    np.fill_diagonal(inter, 0.0)
    L[:, 1:] = inter
    L[:, 0] = np.broadcast_to(np.asarray(external_liab, dtype=float), (n,))
    x = np.broadcast_to(np.asarray(liquid, dtype=float), (n,)).copy()
    units = np.broadcast_to(np.asarray(illiquid_units, dtype=float), (n,))
    S = np.repeat(units[:, None], m, axis=1)
    return FinancialSystem(liabilities=L, liquid=x, holdings=S).require_valid()


def system_to_dict(system: FinancialSystem) -> dict:
    return {
        "n": system.n,
        "m": system.m,
        "liabilities": system.liabilities.tolist(),
        "liquid": system.liquid.tolist(),
        "holdings": system.holdings.tolist(),
    }


def system_from_dict(payload: dict) -> FinancialSystem:
    """Build and validate a system from the JSON document format."""
    try:
        system = FinancialSystem(
            liabilities=payload["liabilities"],
            liquid=payload["liquid"],
            holdings=payload["holdings"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationFailure([Violation("DimensionMismatch", str(exc))]) from exc
    violations = validate(system)
    for key, expected in (("n", system.n), ("m", system.m)):
        if key in payload and int(payload[key]) != expected:
            violations.append(
                Violation("DimensionMismatch", f"declared {key}={payload[key]} but data implies {expected}")
            )
    if violations:
        raise ValidationFailure(violations)
    return system


def load_system(path) -> FinancialSystem:
    with open(path, "r", encoding="utf-8") as fh:
        return system_from_dict(json.load(fh))


def dump_system(system: FinancialSystem, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(system_to_dict(system), fh, indent=2)
        fh.write("\n")
