"""fireclear: joint clearing of interbank payments, fire-sale asset prices,
and endogenously determined market liquidity."""

from .clearing import (
    ClearingState,
    ComparisonReport,
    SolveReport,
    SolverConfig,
    apply_phi,
    compare_fixed_vs_endogenous,
    enumerate_solutions,
    solve_greatest,
    solve_least,
    solve_with_members,
)
from .fda import FdaTrace, insolvency_set, inner_fixed_point, solve_fda
from .inverse_demand import (
    ExponentialInverseDemand,
    FixedLiquidity,
    LinearInverseDemand,
    check_idf_monotonicity,
    idf_from_config,
    idf_to_config,
    market_makers,
)
from .liquidation import (
    ProportionalRule,
    check_minimal_liquidation,
    get_rule,
    liquidate_proportional,
    shortfall,
)
from .network import (
    FinancialSystem,
    LatticeBounds,
    RelativeLiabilities,
    Uniform,
    derive_relative_liabilities,
    dump_system,
    generate_random_system,
    lattice_bounds,
    load_system,
    system_from_dict,
    system_to_dict,
    validate,
)

__version__ = "0.1.0"
