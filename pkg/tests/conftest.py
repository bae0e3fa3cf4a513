"""Shared fixtures and independent oracles for the test suite.

The oracle functions work the two-bank systems out in closed form from the
branch algebra (quadratics in the price), so the solver is checked against
arithmetic it does not share.
"""

import numpy as np
import pytest

from fireclear import (
    LinearInverseDemand,
    ProportionalRule,
    SolverConfig,
    derive_relative_liabilities,
)
from fireclear.scenarios import counterexample_idf, counterexample_system


@pytest.fixture
def two_bank_system():
    return counterexample_system()


@pytest.fixture
def two_bank_rel(two_bank_system):
    return derive_relative_liabilities(two_bank_system)


@pytest.fixture
def two_bank_idf():
    return counterexample_idf()


@pytest.fixture
def rule():
    return ProportionalRule()


@pytest.fixture
def cfg():
    return SolverConfig()


def two_bank_greatest_oracle():
    """Closed form for the one-maker branch of the two-bank fixture.

    Bank 0 pays in full and raises exactly its shortfall of 2 by selling
    2/q units, so q = 1 - (2/q)/16, i.e. 8q^2 - 8q + 1 = 0 (upper root).
    """
    q = float(np.max(np.roots([8.0, -8.0, 1.0])))
    return np.array([2.0, 1.0]), np.array([q]), np.array([0.0, 0.001])


def two_bank_least_oracle():
    """Closed form for the zero-maker branch of the two-bank fixture.

    Bank 0 dumps all 2.35 units and pays 2.35q; bank 1 sells
    (0.999 - 1.175q)/q units to cover its own gap; q = 1 - theta/15 gives
    15q^2 - 13.825q + 0.999 = 0 (upper root).
    """
    q = float(np.max(np.roots([15.0, -13.825, 0.999])))
    return np.array([2.35 * q, 1.0]), np.array([q]), np.array([0.0, 0.0])


def full_overlap_price_oracle():
    """Identical-portfolio two-bank study: with holdings (1, 1) each and a
    shortfall of 1.85 for bank 0, the sold fraction u solves
    0.1 u^2 - 2 u + 1.85 = 0 (lower root) and q = 1 - u/20, for every
    correlation under the constant-market-variance rule."""
    u = float(np.min(np.roots([0.1, -2.0, 1.85])))
    return 1.0 - u / 20.0


def disjoint_portfolio_price_oracle():
    """Fully diverse two-bank study at zero correlation.

    Bank 0 holds only asset 1 and dumps its 2 units (q2 = 1 - 2/10 = 0.8);
    bank 0 then pays 2*q2 + 1 = 2.6, leaving bank 1 a shortfall of
    1 - 2.6/2.85 covered by selling asset 0, so q1^2 - q1 + shortfall/10 = 0.
    """
    q2 = 0.8
    short = 1.0 - (2.0 * q2 + 1.0) / 2.85
    q1 = float(np.max(np.roots([1.0, -1.0, short / 10.0])))
    return np.array([q1, q2])


def overlap_jump_oracle():
    """Zero-correlation jump: the full-payment branch exists while the sold
    portfolio covers the 1.85 shortfall, i.e. lam^2 + (2-lam)^2 <= 3; the
    boundary solves 2 lam^2 - 4 lam + 1 = 0.  Right-limit prices are
    1 - s/20 evaluated at the boundary holdings."""
    lam = float(np.min(np.roots([2.0, -4.0, 1.0])))
    q_right = np.array([1.0 - lam / 20.0, 1.0 - (2.0 - lam) / 20.0])
    return lam, q_right


def random_clearing_instance(rng, n_max=5, m_max=2, unique_scale=False):
    """A random small system plus a monotone linear inverse demand model.

    With ``unique_scale`` the impact divisor is large enough that theta
    times the price stays increasing over the sellable range, which makes
    the clearing solution of every frozen market-maker configuration unique.
    """
    from fireclear import FinancialSystem

    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    liquid = rng.uniform(0.0, 1.5, n)
    holdings = rng.uniform(0.5, 3.0, (n, m))
    L = np.zeros((n, n + 1))
    inter = rng.uniform(0.0, 1.2, (n, n))
    np.fill_diagonal(inter, 0.0)
    L[:, 1:] = inter
    L[:, 0] = rng.uniform(0.5, 2.0, n)
    system = FinancialSystem(liabilities=L, liquid=liquid, holdings=holdings)

    mu = rng.uniform(0.9, 1.2, m)
    sig = rng.uniform(0.5, 1.5, m)
    cov = np.diag(sig**2)
    if m == 2:
        rho = rng.uniform(0.0, 0.9)
        cov[0, 1] = cov[1, 0] = rho * sig[0] * sig[1]
    total_units = float(holdings.sum())
    if unique_scale:
        divisor = 4.8 * float(np.max(cov)) * total_units / float(np.min(mu))
    else:
        divisor = rng.uniform(1.5, 4.0) * total_units
    # half the tolerance from society, half spread over the banks
    alpha0 = 2.0 / divisor
    alpha = np.full(n, 2.0 * n / divisor)
    idf = LinearInverseDemand(mu=mu, cov=cov, alpha0=alpha0, alpha=alpha)
    return system, idf
