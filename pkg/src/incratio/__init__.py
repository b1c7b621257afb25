"""Competitive equilibria and incentive ratios for exchange economies.

Supports linear, Leontief and Cobb-Douglas markets with endogenous
budgets (agents trade commodity endowments at market prices). Computes
equilibria in closed form where the family admits it, searches for the
best utility misreport an agent can make, and packages the analytic
witness families whose gains grow without bound.
"""

from .errors import (
    AssumptionViolationError,
    BoundViolationError,
    DegenerateMarketError,
    DemandUndefinedError,
    IncratioError,
    MultiValuedDemandError,
    SolverError,
    UnboundedDemandError,
)
from .kernels import BACKEND
from .markets import (
    DemandResult,
    Economy,
    Equilibrium,
    EquilibriumCheck,
    ReportProfile,
    SolverConfig,
    UtilityFunction,
    UtilityKind,
    assumption1_violations,
    demand,
    excess_demand,
    is_equilibrium,
    max_utility_on_budget_set,
    utility_eval,
    validate_economy,
)
from .ratio import (
    E_TO_THE_1_OVER_E,
    CdWitnessResult,
    ClosedFormRatio,
    OptimizerConfig,
    PowerInequalityReport,
    RatioQuery,
    RatioResult,
    UpperBoundConfig,
    UpperBoundReport,
    WitnessResult,
    check_power_inequality,
    incentive_ratio_cd,
    ratio_closed_form_2x2,
    verify_upper_bound_m,
    witness_cd,
    witness_leontief,
    witness_linear,
)
from .sampling import sample_cd_economy, sample_simplex
from .solvers import (
    Cd2x2Solution,
    EquilibriumSet,
    brute_force_equilibrium,
    cd_fixed_point_price,
    solve_cd_2x2,
    solve_cobb_douglas,
    solve_leontief,
    solve_linear_smallscale,
)
from .spending import (
    SpendingMatrix,
    adjugate,
    budget_determinant,
    build_spending_matrix,
    check_budget_invariance,
    concentration_bound,
    price_from_adjugate,
)

__version__ = "0.1.0"

__all__ = [
    "AssumptionViolationError",
    "BACKEND",
    "BoundViolationError",
    "Cd2x2Solution",
    "CdWitnessResult",
    "ClosedFormRatio",
    "DegenerateMarketError",
    "DemandResult",
    "DemandUndefinedError",
    "E_TO_THE_1_OVER_E",
    "Economy",
    "Equilibrium",
    "EquilibriumCheck",
    "EquilibriumSet",
    "IncratioError",
    "MultiValuedDemandError",
    "OptimizerConfig",
    "PowerInequalityReport",
    "RatioQuery",
    "RatioResult",
    "ReportProfile",
    "SolverConfig",
    "SolverError",
    "SpendingMatrix",
    "UnboundedDemandError",
    "UpperBoundConfig",
    "UpperBoundReport",
    "UtilityFunction",
    "UtilityKind",
    "WitnessResult",
    "adjugate",
    "assumption1_violations",
    "brute_force_equilibrium",
    "budget_determinant",
    "build_spending_matrix",
    "cd_fixed_point_price",
    "check_budget_invariance",
    "check_power_inequality",
    "concentration_bound",
    "demand",
    "excess_demand",
    "incentive_ratio_cd",
    "is_equilibrium",
    "max_utility_on_budget_set",
    "price_from_adjugate",
    "ratio_closed_form_2x2",
    "sample_cd_economy",
    "sample_simplex",
    "solve_cd_2x2",
    "solve_cobb_douglas",
    "solve_leontief",
    "solve_linear_smallscale",
    "utility_eval",
    "validate_economy",
    "verify_upper_bound_m",
    "witness_cd",
    "witness_leontief",
    "witness_linear",
]
