"""Inverse demand functions: aggregate liquidations and market liquidity in,
asset prices out.

Three families are provided:

* ``LinearInverseDemand`` -- liquidity-adjusted linear model.  Price impact is
  ``C theta`` scaled by the inverse of the total risk tolerance of society
  plus the current market makers, so prices fall harder when fewer banks have
  surplus liquidity.  Monotone exactly when all covariance entries are
  nonnegative.
* ``ExponentialInverseDemand`` -- ``exp(-theta_k / sum(M))`` per asset; a
  jointly continuous alternative with values in [0, 1].
* ``FixedLiquidity`` -- wraps another model and freezes its liquidity input,
  giving the classical benchmark where price impacts ignore bank distress.

Market-maker membership
-----------------------
``market_makers(M)`` uses strict positivity with a 1e-12 clamp, which is the
right reading for a free-standing liquidity vector.  Inside the clearing map
the membership is decided from the raw liquidity surplus ``x + A^T p - pbar``
*before* truncation at zero, treating banks exactly on the boundary (surplus
zero, hence no forced sales) as market makers.  The two rules agree except on
that boundary; the boundary-inclusive rule is the one under which the
reference two-bank equilibria are actual fixed points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import NegativeLiquidation

__all__ = [
    "MM_CLAMP",
    "market_makers",
    "maker_mask_from_excess",
    "LinearInverseDemand",
    "ExponentialInverseDemand",
    "FixedLiquidity",
    "InverseDemandModel",
    "check_idf_monotonicity",
    "idf_from_config",
    "idf_to_config",
]

MM_CLAMP = 1e-12


def market_makers(M) -> list[int]:
    """Indices of banks with strictly positive liquidity, clamping values at
    or below 1e-12 to zero."""
    M = np.asarray(M, dtype=float)
    return [int(i) for i in np.nonzero(M > MM_CLAMP)[0]]


def maker_mask_from_excess(excess, scale=1.0) -> np.ndarray:
    """Boundary-inclusive membership from the raw (pre-truncation) liquidity
    surplus: a bank with surplus >= 0 has no shortfall and provides liquidity.

    ``scale`` sets the comparison tolerance relative to balance-sheet size so
    that one-ulp cancellation noise cannot flip membership.
    """
    excess = np.asarray(excess, dtype=float)
    tol = MM_CLAMP * np.maximum(1.0, np.asarray(scale, dtype=float))
    return excess >= -tol


def _check_theta(theta, m: int) -> np.ndarray:
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if theta.shape != (m,):
        raise NegativeLiquidation(f"liquidation vector must have shape ({m},), got {theta.shape}")
    if np.any(theta < -1e-12):
        raise NegativeLiquidation(f"liquidations must be nonnegative, got {theta}")
    return np.maximum(theta, 0.0)


@dataclass(frozen=True)
class LinearInverseDemand:
    """``F(theta, M) = (mu - Ctheta / (1/alpha0 + sum_{makers} 1/alpha_i))^+``.

    mu : (m,) base prices.
    cov : (m, m) symmetric covariance; nonnegative entries keep F monotone.
    alpha0 : societal risk aversion, > 0.
    alpha : (n,) bank risk aversions, > 0.

    Prices are floored at zero to stay inside the solution lattice.
    """

    mu: np.ndarray
    cov: np.ndarray
    alpha0: float
    alpha: np.ndarray

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        cov = np.atleast_2d(np.asarray(self.cov, dtype=float))
        alpha = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        if cov.shape != (mu.shape[0], mu.shape[0]):
            raise ValueError(f"cov must be ({mu.shape[0]}, {mu.shape[0]}), got {cov.shape}")
        if not np.allclose(cov, cov.T, atol=1e-12):
            raise ValueError("cov must be symmetric")
        if self.alpha0 <= 0 or np.any(alpha <= 0):
            raise ValueError("risk aversions must be strictly positive")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "alpha", alpha)
        for arr in (self.mu, self.cov, self.alpha):
            arr.setflags(write=False)

    @property
    def m(self) -> int:
        return self.mu.shape[0]

    @property
    def n(self) -> int:
        return self.alpha.shape[0]

    def risk_tolerance(self, maker_mask) -> float:
        """Total risk tolerance ``1/alpha0 + sum over makers of 1/alpha_i``."""
        mask = np.asarray(maker_mask, dtype=bool)
        return 1.0 / self.alpha0 + float(np.sum(1.0 / self.alpha[mask]))

    def price_given_makers(self, theta, maker_mask) -> np.ndarray:
        theta = _check_theta(theta, self.m)
        impact = (self.cov @ theta) / self.risk_tolerance(maker_mask)
        return np.maximum(self.mu - impact, 0.0)

    def price(self, theta, M) -> np.ndarray:
        """Evaluate with membership read from ``M`` via strict positivity."""
        M = np.asarray(M, dtype=float)
        return self.price_given_makers(theta, M > MM_CLAMP)

    def price_from_excess(self, theta, excess, scale=1.0) -> np.ndarray:
        """Evaluate with boundary-inclusive membership from the raw surplus;
        this is the form used inside the clearing map."""
        return self.price_given_makers(theta, maker_mask_from_excess(excess, scale))


@dataclass(frozen=True)
class ExponentialInverseDemand:
    """``F_k(theta, M) = exp(-theta_k / sum(M))``; at zero total liquidity the
    pointwise limit is used (1 where theta_k = 0, else 0)."""

    def price(self, theta, M) -> np.ndarray:
        M = np.asarray(M, dtype=float)
        theta = _check_theta(theta, np.atleast_1d(theta).shape[0])
        total = float(np.sum(M))
        if total <= 0.0:
            return np.where(theta > 0, 0.0, 1.0)
        return np.exp(-theta / total)

    def price_from_excess(self, theta, excess, scale=1.0) -> np.ndarray:
        return self.price(theta, np.maximum(np.asarray(excess, dtype=float), 0.0))


@dataclass(frozen=True)
class FixedLiquidity:
    """Evaluate ``inner`` at a frozen liquidity vector, ignoring the state."""

    inner: Union[LinearInverseDemand, ExponentialInverseDemand]
    m_fixed: np.ndarray

    def __post_init__(self):
        m_fixed = np.atleast_1d(np.asarray(self.m_fixed, dtype=float))
        if np.any(m_fixed < 0):
            raise ValueError("frozen liquidity must be nonnegative")
        object.__setattr__(self, "m_fixed", m_fixed)
        self.m_fixed.setflags(write=False)

    def price(self, theta, M) -> np.ndarray:
        return self.inner.price(theta, self.m_fixed)

    def price_from_excess(self, theta, excess, scale=1.0) -> np.ndarray:
        return self.inner.price(theta, self.m_fixed)


InverseDemandModel = Union[LinearInverseDemand, ExponentialInverseDemand, FixedLiquidity]


def check_idf_monotonicity(
    model,
    samples: int = 200,
    seed: int = 0,
    m: int | None = None,
    n: int | None = None,
    theta_max: float = 5.0,
    m_max: float = 5.0,
    tol: float = 1e-12,
) -> bool:
    """Sampling check of the two monotonicity requirements: prices fall (or
    hold) when liquidations rise, and rise (or hold) when liquidity rises.

    Ordered pairs are drawn at random and along each axis separately so that a
    single-asset violation (e.g. one negative covariance entry) cannot hide.
    """
    if m is None:
        m = getattr(model, "m", None)
        if m is None:
            m = getattr(getattr(model, "inner", None), "m", None)
    if n is None:
        n = getattr(model, "n", None)
        if n is None:
            n = getattr(getattr(model, "inner", None), "n", None)
    if m is None or n is None:
        raise ValueError("cannot infer dimensions from model; pass m and n explicitly")

    rng = np.random.default_rng(seed)
    for k in range(samples):
        theta_lo = rng.uniform(0.0, theta_max, size=m)
        bump = rng.uniform(0.0, theta_max, size=m)
        if k % (2 * m + 1) != 0:
            # axis-aligned bump to expose cross-impact sign violations
            axis = k % m
            bump = np.zeros(m)
            bump[axis] = rng.uniform(0.1, theta_max)
        theta_hi = theta_lo + bump
        M = rng.uniform(0.0, m_max, size=n)
        hi = np.asarray(model.price(theta_hi, M), dtype=float)
        lo = np.asarray(model.price(theta_lo, M), dtype=float)
        if np.any(hi > lo + tol):
            return False

        theta = rng.uniform(0.0, theta_max, size=m)
        M_lo = rng.uniform(0.0, m_max, size=n)
        M_hi = M_lo + rng.uniform(0.0, m_max, size=n)
        lo = np.asarray(model.price(theta, M_lo), dtype=float)
        hi = np.asarray(model.price(theta, M_hi), dtype=float)
        if np.any(lo > hi + tol):
            return False
    return True


def idf_to_config(model) -> dict:
    if isinstance(model, LinearInverseDemand):
        return {
            "type": "linear",
            "mu": model.mu.tolist(),
            "cov": model.cov.tolist(),
            "alpha0": model.alpha0,
            "alpha": model.alpha.tolist(),
        }
    if isinstance(model, ExponentialInverseDemand):
        return {"type": "exponential"}
    if isinstance(model, FixedLiquidity):
        return {
            "type": "fixed",
            "inner": idf_to_config(model.inner),
            "m_fixed": model.m_fixed.tolist(),
        }
    raise TypeError(f"unknown inverse demand model {type(model)!r}")


def idf_from_config(config: dict):
    kind = config.get("type")
    if kind == "linear":
        return LinearInverseDemand(
            mu=config["mu"], cov=config["cov"], alpha0=config["alpha0"], alpha=config["alpha"]
        )
    if kind == "exponential":
        return ExponentialInverseDemand()
    if kind == "fixed":
        return FixedLiquidity(inner=idf_from_config(config["inner"]), m_fixed=config["m_fixed"])
    raise ValueError(f"unknown inverse demand type {kind!r}")
