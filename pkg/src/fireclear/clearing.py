"""The joint clearing map and its fixed-point solvers.

A clearing state is a triple ``(p, q, M)`` of payments, prices, and market
liquidity.  One application of the clearing map updates all three components
simultaneously (Jacobi style) from the input state:

* payments: limited liability, ``pbar ^ (x + S q + A^T p)``;
* prices: the inverse demand function at the aggregate liquidation, with
  market-maker membership read off the raw liquidity surplus of ``p``;
* liquidity: ``(x + A^T p - pbar)^+``.

Because the map is monotone on the lattice ``[0, pbar] x [0, q_top] x
[0, M_top]``, Picard iteration from the top converges downward to the greatest
fixed point and iteration from the origin converges upward to the least one.
Convergence is declared only when both the step size and the fixed-point
residual are small: at discontinuities of the inverse demand function an
iterate can stall without being a solution, and the residual check catches
that.  A stalled from-bottom run falls back to exhaustive enumeration over
market-maker configurations when the model allows it.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from .errors import EnumerationCapExceeded, EnumerationUnsupported, StateOutOfLattice
from .inverse_demand import (
    FixedLiquidity,
    LinearInverseDemand,
    maker_mask_from_excess,
)
from .liquidation import ProportionalRule
from .network import (
    FinancialSystem,
    LatticeBounds,
    RelativeLiabilities,
    derive_relative_liabilities,
    lattice_bounds,
)

__all__ = [
    "ClearingState",
    "SolverConfig",
    "SolveReport",
    "ComparisonReport",
    "apply_phi",
    "solve_greatest",
    "solve_least",
    "solve_with_members",
    "enumerate_solutions",
    "enumeration_candidates",
    "compare_fixed_vs_endogenous",
]

_LATTICE_SLACK = 1e-9


@dataclass(frozen=True)
class ClearingState:
    """A point in the payment x price x liquidity lattice."""

    p: np.ndarray
    q: np.ndarray
    M: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", np.atleast_1d(np.asarray(self.p, dtype=float)))
        object.__setattr__(self, "q", np.atleast_1d(np.asarray(self.q, dtype=float)))
        object.__setattr__(self, "M", np.atleast_1d(np.asarray(self.M, dtype=float)))

    def distance(self, other: "ClearingState") -> float:
        """Sup-norm over all three components."""
        return max(
            float(np.max(np.abs(self.p - other.p), initial=0.0)),
            float(np.max(np.abs(self.q - other.q), initial=0.0)),
            float(np.max(np.abs(self.M - other.M), initial=0.0)),
        )

    def dominates(self, other: "ClearingState", slack: float = 0.0) -> bool:
        return bool(
            np.all(self.p >= other.p - slack)
            and np.all(self.q >= other.q - slack)
            and np.all(self.M >= other.M - slack)
        )

    def to_dict(self) -> dict:
        return {"p": self.p.tolist(), "q": self.q.tolist(), "M": self.M.tolist()}


@dataclass(frozen=True)
class SolverConfig:
    """Iteration controls shared by every solver.

    tolerance : sup-norm threshold on successive iterates; the fixed-point
        residual must additionally be below ``10 * tolerance``.
    default_tol : a bank is classified as defaulting when its payment falls
        short of its obligation by more than this.
    enumeration_cap : largest n for which market-maker enumeration runs.
    """

    tolerance: float = 1e-10
    max_iterations: int = 10_000
    default_tol: float = 1e-8
    enumeration_cap: int = 20

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass(frozen=True)
class SolveReport:
    """A clearing solution plus convergence diagnostics."""

    state: ClearingState
    iterations: int
    residual: float
    converged: bool
    defaults: list[int]
    market_makers: list[int]
    direction: str

    def to_dict(self) -> dict:
        return {
            **self.state.to_dict(),
            "iterations": self.iterations,
            "residual": self.residual,
            "converged": self.converged,
            "defaults": self.defaults,
            "market_makers": self.market_makers,
            "direction": self.direction,
        }


def _scale(rel: RelativeLiabilities) -> float:
    return 1.0 + float(np.max(rel.pbar, initial=0.0))


def _phi_once(system, rel, rule, idf, bounds, p, q, M):
    """One simultaneous application of the clearing map, clamped to the
    lattice."""
    excess = system.liquid + rel.A.T @ p - rel.pbar
    p_new = np.minimum(rel.pbar, system.liquid + system.holdings @ q + rel.A.T @ p)
    theta = rule.liquidate(system, rel, p, q).sum(axis=0)
    q_new = np.asarray(idf.price_from_excess(theta, excess, scale=_scale(rel)), dtype=float)
    M_new = np.maximum(excess, 0.0)
    p_new = np.clip(p_new, 0.0, rel.pbar)
    q_new = np.clip(q_new, 0.0, bounds.q_top)
    M_new = np.clip(M_new, 0.0, bounds.M_top)
    return p_new, q_new, M_new


def _require_in_lattice(state: ClearingState, rel, bounds) -> None:
    slack = _LATTICE_SLACK * _scale(rel)
    ok = (
        np.all(state.p >= -slack)
        and np.all(state.p <= rel.pbar + slack)
        and np.all(state.q >= -slack)
        and np.all(state.q <= bounds.q_top + slack)
        and np.all(state.M >= -slack)
        and np.all(state.M <= bounds.M_top + slack)
    )
    if not ok:
        raise StateOutOfLattice(f"state outside the solution lattice: {state.to_dict()}")


def apply_phi(
    system: FinancialSystem,
    rel: RelativeLiabilities,
    rule,
    idf,
    state: ClearingState,
) -> ClearingState:
    """Apply the clearing map once to ``state`` (must lie in the lattice)."""
    bounds = lattice_bounds(system, idf)
    _require_in_lattice(state, rel, bounds)
    p, q, M = _phi_once(system, rel, rule, idf, bounds, state.p, state.q, state.M)
    return ClearingState(p=p, q=q, M=M)


@dataclass
class _IterationResult:
    state: ClearingState
    iterations: int
    residual: float
    converged: bool
    stalled: bool
    path: list[ClearingState] = field(default_factory=list)


def _picard(system, rel, rule, idf, cfg, start: ClearingState, keep_path=False) -> _IterationResult:
    bounds = lattice_bounds(system, idf)
    p, q, M = start.p.copy(), start.q.copy(), start.M.copy()
    path = [ClearingState(p, q, M)] if keep_path else []
    diff = np.inf
    iterations = 0
    for iterations in range(1, cfg.max_iterations + 1):
        p_new, q_new, M_new = _phi_once(system, rel, rule, idf, bounds, p, q, M)
        diff = max(
            float(np.max(np.abs(p_new - p), initial=0.0)),
            float(np.max(np.abs(q_new - q), initial=0.0)),
            float(np.max(np.abs(M_new - M), initial=0.0)),
        )
        p, q, M = p_new, q_new, M_new
        if keep_path:
            path.append(ClearingState(p, q, M))
        if diff <= cfg.tolerance:
            break
    state = ClearingState(p, q, M)
    p_r, q_r, M_r = _phi_once(system, rel, rule, idf, bounds, p, q, M)
    residual = state.distance(ClearingState(p_r, q_r, M_r))
    settled = diff <= cfg.tolerance
    converged = settled and residual <= 10.0 * cfg.tolerance
    stalled = settled and not converged
    return _IterationResult(state, iterations, residual, converged, stalled, path)


def _report(system, rel, cfg, result: _IterationResult, direction: str) -> SolveReport:
    state = result.state
    defaults = [int(i) for i in np.nonzero(state.p < rel.pbar - cfg.default_tol)[0]]
    excess = system.liquid + rel.A.T @ state.p - rel.pbar
    makers = [int(i) for i in np.nonzero(maker_mask_from_excess(excess, _scale(rel)))[0]]
    return SolveReport(
        state=state,
        iterations=result.iterations,
        residual=result.residual,
        converged=result.converged,
        defaults=defaults,
        market_makers=makers,
        direction=direction,
    )


def _top_state(system, idf) -> ClearingState:
    bounds = lattice_bounds(system, idf)
    return ClearingState(p=bounds.p_top, q=bounds.q_top, M=bounds.M_top)


def _bottom_state(system) -> ClearingState:
    return ClearingState(
        p=np.zeros(system.n), q=np.zeros(system.m), M=np.zeros(system.n)
    )


def solve_greatest(
    system: FinancialSystem,
    rel: RelativeLiabilities | None = None,
    rule=None,
    idf=None,
    cfg: SolverConfig | None = None,
    keep_path: bool = False,
) -> SolveReport:
    """Greatest clearing solution by monotone iteration from the lattice top.

    The caller is responsible for supplying a monotone inverse demand
    function; under that assumption the iterate sequence is componentwise
    non-increasing and its limit dominates every clearing solution.
    """
    rel = rel if rel is not None else derive_relative_liabilities(system)
    rule = rule if rule is not None else ProportionalRule()
    cfg = cfg if cfg is not None else SolverConfig()
    result = _picard(system, rel, rule, idf, cfg, _top_state(system, idf), keep_path)
    report = _report(system, rel, cfg, result, "FromTop")
    return (report, result.path) if keep_path else report


def solve_least(
    system: FinancialSystem,
    rel: RelativeLiabilities | None = None,
    rule=None,
    idf=None,
    cfg: SolverConfig | None = None,
    keep_path: bool = False,
):
    """Least clearing solution by monotone iteration from the origin.

    Every from-bottom iterate is dominated by every clearing solution, so a
    converged limit is the least one.  If the iteration stalls at a
    discontinuity (step size small but residual large), the solver falls back
    to market-maker enumeration when the model supports it and returns the
    smallest self-consistent solution; otherwise the stalled iterate is
    returned with ``converged=False``.
    """
    rel = rel if rel is not None else derive_relative_liabilities(system)
    rule = rule if rule is not None else ProportionalRule()
    cfg = cfg if cfg is not None else SolverConfig()
    result = _picard(system, rel, rule, idf, cfg, _bottom_state(system), keep_path)
    if result.stalled and _enumerable(idf) and system.n <= cfg.enumeration_cap:
        solutions = enumerate_solutions(system, rel, rule, idf, cfg)
        if solutions:
            report = replace(solutions[-1], direction="Enumeration")
            return (report, result.path) if keep_path else report
    report = _report(system, rel, cfg, result, "FromBottom")
    return (report, result.path) if keep_path else report


def _enumerable(idf) -> bool:
    return isinstance(idf, LinearInverseDemand)


@dataclass(frozen=True)
class _FrozenMembers:
    """Linear inverse demand with the market-maker set pinned, used to solve
    one enumeration candidate; ignores the state's own liquidity."""

    inner: LinearInverseDemand
    mask: np.ndarray

    def price(self, theta, M):
        return self.inner.price_given_makers(theta, self.mask)

    def price_from_excess(self, theta, excess, scale=1.0):
        return self.inner.price_given_makers(theta, self.mask)


def solve_with_members(
    system: FinancialSystem,
    rel: RelativeLiabilities,
    rule,
    idf: LinearInverseDemand,
    maker_mask,
    cfg: SolverConfig,
) -> SolveReport:
    """Greatest solution of the clearing system with the linear model's
    market-maker set frozen to ``maker_mask``."""
    if not isinstance(idf, LinearInverseDemand):
        raise EnumerationUnsupported("frozen-membership solves need the linear model")
    frozen = _FrozenMembers(inner=idf, mask=np.asarray(maker_mask, dtype=bool))
    result = _picard(system, rel, rule, frozen, cfg, _top_state(system, frozen))
    return _report(system, rel, cfg, result, "Enumeration")


def _candidate_masks(system, idf, cfg):
    n = system.n
    homogeneous = np.unique(idf.alpha).size == 1
    if homogeneous:
        # only the number of makers matters, so n+1 candidates suffice
        for k in range(n + 1):
            mask = np.zeros(n, dtype=bool)
            mask[:k] = True
            yield k, mask
    else:
        if n > cfg.enumeration_cap:
            raise EnumerationCapExceeded(
                f"cannot enumerate 2^{n} market-maker sets (cap {cfg.enumeration_cap})"
            )
        for r in range(n + 1):
            for combo in combinations(range(n), r):
                mask = np.zeros(n, dtype=bool)
                mask[list(combo)] = True
                yield None, mask


def enumeration_candidates(
    system: FinancialSystem,
    rel: RelativeLiabilities,
    rule,
    idf,
    cfg: SolverConfig,
) -> list[dict]:
    """Solve every frozen market-maker configuration and mark the
    self-consistent ones.

    For homogeneous risk aversions only the maker count matters, so the
    candidates are the counts 0..n; otherwise every subset is tried (which is
    capped).  A candidate is kept when the realized maker set of its solution
    matches the assumption and the solution is a fixed point of the true map.
    """
    if not isinstance(idf, LinearInverseDemand):
        raise EnumerationUnsupported(
            "enumeration requires the liquidity-adjusted linear inverse demand model"
        )
    inner = idf
    if system.n > cfg.enumeration_cap:
        raise EnumerationCapExceeded(
            f"n={system.n} exceeds the enumeration cap {cfg.enumeration_cap}"
        )
    candidates = []
    for count, mask in _candidate_masks(system, inner, cfg):
        report = solve_with_members(system, rel, rule, inner, mask, cfg)
        realized = np.zeros(system.n, dtype=bool)
        realized[report.market_makers] = True
        if count is not None:
            consistent = int(realized.sum()) == count
            assumed = count
        else:
            consistent = bool(np.all(realized == mask))
            assumed = [int(i) for i in np.nonzero(mask)[0]]
        residual_ok = report.converged
        if residual_ok and consistent:
            # verify against the true (endogenous-membership) map
            true_res = apply_phi(system, rel, rule, idf, report.state)
            residual_ok = report.state.distance(true_res) <= 10.0 * cfg.tolerance
        candidates.append(
            {
                "assumed": assumed,
                "report": report,
                "self_consistent": bool(consistent and residual_ok),
            }
        )
    return candidates


def enumerate_solutions(
    system: FinancialSystem,
    rel: RelativeLiabilities,
    rule,
    idf,
    cfg: SolverConfig,
) -> list[SolveReport]:
    """All self-consistent clearing solutions found by freezing the
    market-maker configuration, sorted lattice-descending (componentwise sums
    as tie-break order: payments, then prices, then liquidity)."""
    rows = enumeration_candidates(system, rel, rule, idf, cfg)
    kept = [row["report"] for row in rows if row["self_consistent"]]
    kept.sort(
        key=lambda r: (
            -float(np.sum(r.state.p)),
            -float(np.sum(r.state.q)),
            -float(np.sum(r.state.M)),
        )
    )
    return kept


@dataclass(frozen=True)
class ComparisonReport:
    """Greatest solutions of the endogenous-liquidity system and of the fixed
    benchmark (liquidity frozen at the all-ones vector), with their gaps."""

    endogenous: SolveReport
    fixed: SolveReport
    price_gap: np.ndarray
    default_gap: int

    def to_dict(self) -> dict:
        return {
            "endogenous": self.endogenous.to_dict(),
            "fixed": self.fixed.to_dict(),
            "price_gap": self.price_gap.tolist(),
            "default_gap": self.default_gap,
        }


def compare_fixed_vs_endogenous(
    system: FinancialSystem,
    rel: RelativeLiabilities | None = None,
    rule=None,
    idf=None,
    cfg: SolverConfig | None = None,
) -> ComparisonReport:
    """Solve the same system under endogenous liquidity and under the
    benchmark with liquidity frozen at 1 for every bank."""
    rel = rel if rel is not None else derive_relative_liabilities(system)
    rule = rule if rule is not None else ProportionalRule()
    cfg = cfg if cfg is not None else SolverConfig()
    endo = solve_greatest(system, rel, rule, idf, cfg)
    benchmark = FixedLiquidity(inner=idf, m_fixed=np.ones(system.n))
    fixed = solve_greatest(system, rel, rule, benchmark, cfg)
    return ComparisonReport(
        endogenous=endo,
        fixed=fixed,
        price_gap=fixed.state.q - endo.state.q,
        default_gap=len(endo.defaults) - len(fixed.defaults),
    )
