"""Liquidation strategies: how much of each asset a bank sells given payments
and prices.

Every rule must satisfy the minimal liquidation condition: the cash raised,
``q . gamma_i``, equals the smaller of the bank's portfolio value and its cash
shortfall.  Banks never buy (gamma >= 0) and never sell more than they own
(gamma <= holdings).
"""

from __future__ import annotations

import numpy as np

from .errors import PaymentOutOfLattice, PriceNegative
from .network import FinancialSystem, RelativeLiabilities

__all__ = [
    "shortfall",
    "liquidate_proportional",
    "ProportionalRule",
    "get_rule",
    "check_minimal_liquidation",
]

_LATTICE_SLACK = 1e-9


def _check_payment(rel: RelativeLiabilities, p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    slack = _LATTICE_SLACK * (1.0 + np.max(rel.pbar, initial=0.0))
    if np.any(p < -slack) or np.any(p > rel.pbar + slack):
        raise PaymentOutOfLattice(f"payment vector outside [0, pbar]: {p}")
    return p


def _check_price(q: np.ndarray) -> np.ndarray:
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if np.any(q < -_LATTICE_SLACK):
        raise PriceNegative(f"price vector has negative entries: {q}")
    return np.maximum(q, 0.0)


def shortfall(system: FinancialSystem, rel: RelativeLiabilities, p) -> np.ndarray:
    """Cash each bank still needs after liquid assets and interbank income:
    ``(pbar_i - x_i - (A^T p)_i)^+``."""
    p = _check_payment(rel, p)
    return np.maximum(rel.pbar - system.liquid - rel.A.T @ p, 0.0)


def liquidate_proportional(
    system: FinancialSystem, rel: RelativeLiabilities, p, q
) -> np.ndarray:
    """Sell slices of the initial portfolio, largest holdings first in fixed
    proportion, raising exactly the shortfall (or everything if that is not
    enough).

    When a bank's portfolio is worthless (``q . s_i = 0``) but it still has a
    shortfall, the full holdings are dumped: that is the monotone limit of the
    rule as prices fall to zero and matches how insolvent banks are treated.
    """
    p = _check_payment(rel, p)
    q = _check_price(q)
    need = shortfall(system, rel, p)
    value = system.holdings @ q
    raise_amount = np.minimum(value, need)
    gamma = np.zeros_like(system.holdings)
    pos = value > 0
    gamma[pos] = system.holdings[pos] * (raise_amount[pos] / value[pos])[:, None]
    dump = (~pos) & (need > 0)
    gamma[dump] = system.holdings[dump]
    return gamma


class ProportionalRule:
    """Tagged wrapper around :func:`liquidate_proportional`."""

    name = "proportional"

    def liquidate(self, system, rel, p, q) -> np.ndarray:
        return liquidate_proportional(system, rel, p, q)


_RULES = {"proportional": ProportionalRule}


def get_rule(name: str):
    try:
        return _RULES[name]()
    except KeyError:
        raise ValueError(f"unknown liquidation rule {name!r}; choose from {sorted(_RULES)}")


def check_minimal_liquidation(
    rule, system: FinancialSystem, rel: RelativeLiabilities, p, q, tol: float = 1e-10
) -> bool:
    """True iff ``q . gamma_i = (q . s_i) ^ shortfall_i`` holds within ``tol``
    for every bank."""
    p = _check_payment(rel, p)
    q = _check_price(q)
    gamma = rule.liquidate(system, rel, p, q)
    raised = gamma @ q
    target = np.minimum(system.holdings @ q, shortfall(system, rel, p))
    return bool(np.all(np.abs(raised - target) <= tol))
