"""Fictitious default algorithm: compute the greatest clearing solution by
iterating on the insolvency set.

Start from full payments and maximal prices, identify the banks whose assets
cannot cover their obligations, and solve a restricted fixed-point problem in
which those banks pay out their full asset value and dump their entire
portfolio while everyone else pays in full.  Re-identify the insolvent banks
at the new state and repeat.  The insolvency set can only grow, so the outer
loop terminates after at most n+1 rounds, and the terminal state is the
greatest clearing solution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .clearing import ClearingState, SolveReport, SolverConfig, _phi_once, _report, _scale
from .clearing import _IterationResult, _top_state
from .liquidation import ProportionalRule
from .network import (
    FinancialSystem,
    RelativeLiabilities,
    derive_relative_liabilities,
    lattice_bounds,
)

__all__ = ["FdaTrace", "FdaRound", "insolvency_set", "inner_fixed_point", "solve_fda"]


@dataclass(frozen=True)
class FdaRound:
    insolvent: frozenset[int]
    state: ClearingState
    inner_iterations: int
    inner_converged: bool


@dataclass
class FdaTrace:
    """Per-round record: the insolvency sets seen (terminating repeat
    included) and the inner solution computed for each."""

    rounds: list[FdaRound] = field(default_factory=list)
    evaluated: list[frozenset[int]] = field(default_factory=list)

    @property
    def outer_iterations(self) -> int:
        return len(self.evaluated)

    def to_dict(self) -> dict:
        return {
            "outer_iterations": self.outer_iterations,
            "insolvency_sets": [sorted(s) for s in self.evaluated],
            "rounds": [
                {
                    "insolvent": sorted(r.insolvent),
                    "state": r.state.to_dict(),
                    "inner_iterations": r.inner_iterations,
                    "inner_converged": r.inner_converged,
                }
                for r in self.rounds
            ],
        }


def insolvency_set(
    system: FinancialSystem,
    rel: RelativeLiabilities,
    state: ClearingState,
    default_tol: float = 1e-8,
) -> frozenset[int]:
    """Banks whose total assets at ``state`` fall strictly below their
    obligations (with tolerance, so exactly-solvent banks stay solvent)."""
    assets = system.liquid + system.holdings @ state.q + rel.A.T @ state.p
    gap = assets - rel.pbar
    return frozenset(int(i) for i in np.nonzero(gap < -default_tol)[0])


def _inner_phi(system, rel, rule, idf, bounds, insolvent_mask, p, q, M):
    """One step of the restricted map: insolvent banks pay their full asset
    value and dump everything; solvent banks pay in full and liquidate per
    the rule.

    Payments of the insolvent set are capped at the obligation: for a
    genuinely insolvent set the cap never binds (assets stay below the
    obligation at the solution), and it keeps the state in the lattice when
    the set fictitiously contains a solvent bank mid-algorithm.
    """
    excess = system.liquid + rel.A.T @ p - rel.pbar
    assets = system.liquid + system.holdings @ q + rel.A.T @ p
    p_new = np.where(insolvent_mask, np.minimum(rel.pbar, assets), rel.pbar)
    gamma = rule.liquidate(system, rel, p, q)
    sales = np.where(insolvent_mask[:, None], system.holdings, gamma)
    theta = sales.sum(axis=0)
    q_new = np.asarray(idf.price_from_excess(theta, excess, scale=_scale(rel)), dtype=float)
    M_new = np.maximum(excess, 0.0)
    return (
        np.clip(p_new, 0.0, rel.pbar),
        np.clip(q_new, 0.0, bounds.q_top),
        np.clip(M_new, 0.0, bounds.M_top),
    )


def inner_fixed_point(
    system: FinancialSystem,
    rel: RelativeLiabilities,
    rule,
    idf,
    insolvent,
    cfg: SolverConfig,
    start: ClearingState | None = None,
) -> tuple[ClearingState, int, bool]:
    """Greatest solution of the restricted problem for a given insolvency set,
    by monotone iteration from the lattice top.

    Returns ``(state, iterations, converged)``.
    """
    bounds = lattice_bounds(system, idf)
    mask = np.zeros(system.n, dtype=bool)
    mask[sorted(insolvent)] = True
    top = start if start is not None else _top_state(system, idf)
    p, q, M = top.p.copy(), top.q.copy(), top.M.copy()
    diff = np.inf
    iterations = 0
    for iterations in range(1, cfg.max_iterations + 1):
        p_new, q_new, M_new = _inner_phi(system, rel, rule, idf, bounds, mask, p, q, M)
        diff = max(
            float(np.max(np.abs(p_new - p), initial=0.0)),
            float(np.max(np.abs(q_new - q), initial=0.0)),
            float(np.max(np.abs(M_new - M), initial=0.0)),
        )
        p, q, M = p_new, q_new, M_new
        if diff <= cfg.tolerance:
            break
    return ClearingState(p, q, M), iterations, diff <= cfg.tolerance


def solve_fda(
    system: FinancialSystem,
    rel: RelativeLiabilities | None = None,
    rule=None,
    idf=None,
    cfg: SolverConfig | None = None,
) -> tuple[SolveReport, FdaTrace]:
    """Greatest clearing solution via the fictitious default algorithm.

    Terminates when the insolvency set repeats.  The set must be nested
    across rounds; a shrinking set indicates numerically degenerate ties and
    raises rather than continuing with an invalid trace.
    """
    rel = rel if rel is not None else derive_relative_liabilities(system)
    rule = rule if rule is not None else ProportionalRule()
    cfg = cfg if cfg is not None else SolverConfig()
    bounds = lattice_bounds(system, idf)

    state = _top_state(system, idf)
    trace = FdaTrace()
    previous: frozenset[int] | None = None
    inner_ok = True
    while True:
        insolvent = insolvency_set(system, rel, state, cfg.default_tol)
        trace.evaluated.append(insolvent)
        if previous is not None:
            if not previous <= insolvent:
                raise RuntimeError(
                    f"insolvency set shrank from {sorted(previous)} to {sorted(insolvent)}"
                )
            if insolvent == previous:
                break
        if len(trace.evaluated) > system.n + 2:
            raise RuntimeError(
                f"insolvency set failed to settle within {system.n + 2} rounds"
            )
        state, inner_iters, inner_ok = inner_fixed_point(
            system, rel, rule, idf, insolvent, cfg
        )
        trace.rounds.append(FdaRound(insolvent, state, inner_iters, inner_ok))
        previous = insolvent

    p_r, q_r, M_r = _phi_once(system, rel, rule, idf, bounds, state.p, state.q, state.M)
    residual = state.distance(ClearingState(p_r, q_r, M_r))
    result = _IterationResult(
        state=state,
        iterations=sum(r.inner_iterations for r in trace.rounds),
        residual=residual,
        converged=bool(inner_ok and residual <= 10.0 * cfg.tolerance),
        stalled=False,
    )
    report = _report(system, rel, cfg, result, "FDA")
    return report, trace
