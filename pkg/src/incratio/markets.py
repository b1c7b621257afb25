"""Exchange-economy domain types, demand theory and equilibrium checking.

Conventions used throughout the package:

* An economy has n agents and m commodities. Endowments are an n x m
  matrix with rows e_i; the total supply of every commodity is normalized
  to 1 (each endowment column sums to 1).
* Utility families are linear (u = alpha . x), Leontief
  (u = min_j x_j / alpha_j) and Cobb-Douglas (u = prod_j x_j ** alpha_j
  with the exponents on the unit simplex, so utility is homogeneous of
  degree 1). A scenario never mixes families.
* Budgets are endogenous: agent i can spend p . e_i at prices p.
* Zero-price and zero-exponent corners follow the conventions that make
  the degenerate witness equilibria verifiable: x ** 0 == 1 even at
  x == 0, a commodity with zero price and zero weight is "free" (any
  amount is optimal), and an agent whose maximal attainable utility is 0
  accepts any affordable bundle that attains 0.

Equilibrium verification (`is_equilibrium`) is deliberately independent
of the solvers: it recomputes the attainable utility maximum on each
agent's budget set analytically and compares.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DemandUndefinedError,
    MultiValuedDemandError,
    UnboundedDemandError,
)

SIMPLEX_TOL = 1e-12       # exponent vectors must sum to 1 within this
SUPPLY_TOL = 1e-12        # endowment columns must sum to 1 within this
DEFAULT_TOL = 1e-8        # clearing / budget / optimality slack
_TIE_RTOL = 1e-12         # relative tolerance for bang-per-buck ties


class UtilityKind(enum.Enum):
    LINEAR = "linear"
    LEONTIEF = "leontief"
    COBB_DOUGLAS = "cobb_douglas"


def _frozen_array(values, ndim):
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class UtilityFunction:
    """A tagged utility function with its parameter vector alpha."""

    kind: UtilityKind
    alpha: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", _frozen_array(self.alpha, 1))
        a = self.alpha
        if np.any(~np.isfinite(a)):
            raise ValueError("alpha must be finite")
        if self.kind is UtilityKind.LINEAR:
            if np.any(a < 0):
                raise ValueError("linear alpha must be nonnegative")
        elif self.kind is UtilityKind.LEONTIEF:
            if np.any(a <= 0):
                raise ValueError("Leontief alpha must be strictly positive")
        elif self.kind is UtilityKind.COBB_DOUGLAS:
            if np.any(a < 0) or np.any(a > 1):
                raise ValueError("Cobb-Douglas alpha must lie in [0, 1]")
            if abs(a.sum() - 1.0) > SIMPLEX_TOL:
                raise ValueError("Cobb-Douglas alpha must sum to 1")
        else:
            raise ValueError(f"unknown utility kind {self.kind!r}")

    @property
    def m(self) -> int:
        return self.alpha.size

    @classmethod
    def linear(cls, alpha) -> "UtilityFunction":
        return cls(UtilityKind.LINEAR, alpha)

    @classmethod
    def leontief(cls, alpha) -> "UtilityFunction":
        return cls(UtilityKind.LEONTIEF, alpha)

    @classmethod
    def cobb_douglas(cls, alpha) -> "UtilityFunction":
        return cls(UtilityKind.COBB_DOUGLAS, alpha)


@dataclass(frozen=True)
class Economy:
    """Agents' endowments plus their true utility functions.

    Value-level invariants (entries in [0, 1], unit column sums) are
    reported by `validate_economy` rather than enforced here, so that
    invalid data can be constructed and then diagnosed.
    """

    endowments: np.ndarray
    utilities: tuple[UtilityFunction, ...]

    def __post_init__(self):
        object.__setattr__(self, "endowments", _frozen_array(self.endowments, 2))
        object.__setattr__(self, "utilities", tuple(self.utilities))
        n, m = self.endowments.shape
        if n < 1 or m < 1:
            raise ValueError("need at least one agent and one commodity")
        if len(self.utilities) != n:
            raise ValueError("one utility function per agent required")
        kinds = {u.kind for u in self.utilities}
        if len(kinds) > 1:
            raise ValueError("utility kinds must not be mixed within an economy")
        for u in self.utilities:
            if u.m != m:
                raise ValueError("utility dimension does not match commodity count")

    @property
    def n(self) -> int:
        return self.endowments.shape[0]

    @property
    def m(self) -> int:
        return self.endowments.shape[1]

    @property
    def kind(self) -> UtilityKind:
        return self.utilities[0].kind

    def alpha_matrix(self) -> np.ndarray:
        return np.vstack([u.alpha for u in self.utilities])


@dataclass(frozen=True)
class ReportProfile:
    """The utility functions the agents announce (truthful or not)."""

    reports: tuple[UtilityFunction, ...]

    def __post_init__(self):
        object.__setattr__(self, "reports", tuple(self.reports))
        if not self.reports:
            raise ValueError("empty report profile")
        kinds = {r.kind for r in self.reports}
        if len(kinds) > 1:
            raise ValueError("all reports must share one utility kind")
        sizes = {r.m for r in self.reports}
        if len(sizes) > 1:
            raise ValueError("all reports must have the same dimension")

    @property
    def n(self) -> int:
        return len(self.reports)

    @property
    def kind(self) -> UtilityKind:
        return self.reports[0].kind

    @classmethod
    def truthful(cls, economy: Economy) -> "ReportProfile":
        return cls(economy.utilities)

    def replace(self, agent: int, report: UtilityFunction) -> "ReportProfile":
        reports = list(self.reports)
        reports[agent] = report
        return ReportProfile(tuple(reports))

    def alpha_matrix(self) -> np.ndarray:
        return np.vstack([r.alpha for r in self.reports])


@dataclass(frozen=True)
class Equilibrium:
    """Prices and an allocation, with the residuals that certify them."""

    prices: np.ndarray
    allocation: np.ndarray
    clearing_residual: np.ndarray   # per commodity: sum_i x_ij - sum_i e_ij
    budget_residual: np.ndarray     # per agent: p.x_i - p.e_i

    def __post_init__(self):
        object.__setattr__(self, "prices", _frozen_array(self.prices, 1))
        object.__setattr__(self, "allocation", _frozen_array(self.allocation, 2))
        object.__setattr__(
            self, "clearing_residual", _frozen_array(self.clearing_residual, 1)
        )
        object.__setattr__(
            self, "budget_residual", _frozen_array(self.budget_residual, 1)
        )

    @classmethod
    def assemble(cls, economy: Economy, prices, allocation) -> "Equilibrium":
        prices = np.asarray(prices, dtype=float)
        allocation = np.asarray(allocation, dtype=float)
        clearing = allocation.sum(axis=0) - economy.endowments.sum(axis=0)
        budget = allocation @ prices - economy.endowments @ prices
        return cls(prices, allocation, clearing, budget)

    @property
    def max_clearing_residual(self) -> float:
        return float(np.abs(self.clearing_residual).max())

    def price_ratios(self) -> np.ndarray:
        """Prices normalized so the first commodity costs 1."""
        if self.prices[0] <= 0:
            raise ZeroDivisionError("first price is zero; ratios undefined")
        return self.prices / self.prices[0]


@dataclass(frozen=True)
class SolverConfig:
    clearing_tol: float = DEFAULT_TOL
    price_floor: float = 0.0
    max_iterations: int = 5000
    grid_resolution: int = 41

    def __post_init__(self):
        if self.clearing_tol <= 0:
            raise ValueError("clearing_tol must be positive")
        if self.max_iterations < 1 or self.grid_resolution < 2:
            raise ValueError("max_iterations >= 1 and grid_resolution >= 2 required")


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    rule: str
    where: tuple
    detail: str

    def __str__(self):
        return f"{self.rule}{list(self.where)}: {self.detail}"


def validate_economy(economy: Economy, require_assumption1: bool = False):
    """Check the economy's value invariants; returns a list of violations.

    With `require_assumption1` the positivity of every endowment entry and
    strong competitiveness (every commodity demanded by some agent) are
    checked as well. An empty list means the economy is valid.
    """
    violations = []
    e = economy.endowments
    for (i, j), v in np.ndenumerate(e):
        if not (0.0 <= v <= 1.0):
            violations.append(
                Violation("endowment_range", (i, j), f"entry {v} outside [0, 1]")
            )
    sums = e.sum(axis=0)
    for j, s in enumerate(sums):
        if abs(s - 1.0) > SUPPLY_TOL:
            violations.append(
                Violation("supply_normalization", (j,), f"column sums to {s}, not 1")
            )
    if require_assumption1:
        violations.extend(
            assumption1_violations(economy, ReportProfile.truthful(economy))
        )
    return violations


def assumption1_violations(economy: Economy, reports: ReportProfile):
    """Positivity of endowments plus strong competitiveness of `reports`."""
    violations = []
    e = economy.endowments
    for (i, j), v in np.ndenumerate(e):
        if v <= 0.0:
            violations.append(
                Violation("endowment_positivity", (i, j), f"e[{i},{j}] = {v} not > 0")
            )
    alphas = reports.alpha_matrix()
    for j in range(alphas.shape[1]):
        if not np.any(alphas[:, j] > 0):
            violations.append(
                Violation(
                    "strong_competitiveness",
                    (j,),
                    "no agent reports positive weight on this commodity",
                )
            )
    return violations


# ---------------------------------------------------------------------------
# utility evaluation and demand


def utility_eval(u: UtilityFunction, bundle) -> float:
    """Evaluate u at a nonnegative bundle (x ** 0 == 1 even at x == 0)."""
    x = np.asarray(bundle, dtype=float)
    if x.shape != (u.m,):
        raise ValueError(f"bundle has shape {x.shape}, expected ({u.m},)")
    if u.kind is UtilityKind.LINEAR:
        return float(u.alpha @ x)
    if u.kind is UtilityKind.LEONTIEF:
        return float(np.min(x / u.alpha))
    return float(np.prod(np.power(x, u.alpha)))


@dataclass(frozen=True)
class DemandResult:
    """Demand at given prices: a bundle, or a correspondence descriptor.

    `bundle` is the canonical optimal bundle (free components set to 0).
    For linear utilities `support` lists the commodities that maximize
    bang per buck; the budget may be split across them arbitrarily.
    `free` lists commodities of which any amount is optimal (zero price,
    zero weight). `whole_budget_set` marks the zero-utility linear case
    where every affordable bundle is optimal.
    """

    bundle: np.ndarray
    support: tuple[int, ...] | None = None
    free: tuple[int, ...] = ()
    whole_budget_set: bool = False

    def __post_init__(self):
        object.__setattr__(self, "bundle", _frozen_array(self.bundle, 1))

    @property
    def single_valued(self) -> bool:
        if self.whole_budget_set or self.free:
            return False
        return self.support is None or len(self.support) == 1


def _check_price_budget(p: np.ndarray, budget: float, m: int):
    if p.shape != (m,):
        raise ValueError(f"price vector has shape {p.shape}, expected ({m},)")
    if np.any(p < 0):
        raise ValueError("prices must be nonnegative")
    if not np.any(p > 0):
        raise ValueError("prices must not all be zero")
    if budget < 0:
        raise ValueError("budget must be nonnegative")


def demand(u: UtilityFunction, p, budget: float) -> DemandResult:
    """Solve the consumer problem max u(x) s.t. p.x <= budget, x >= 0."""
    p = np.asarray(p, dtype=float)
    _check_price_budget(p, budget, u.m)
    a = u.alpha

    if u.kind is UtilityKind.LEONTIEF:
        denom = float(p @ a)
        if denom <= 0.0:
            raise DemandUndefinedError("Leontief demand: p . alpha = 0")
        return DemandResult(bundle=(budget / denom) * a)

    if u.kind is UtilityKind.LINEAR:
        if np.any((a > 0) & (p == 0)):
            raise UnboundedDemandError("a desired commodity has zero price")
        free = tuple(np.nonzero(p == 0)[0])
        if not np.any(a > 0):
            return DemandResult(
                bundle=np.zeros(u.m), free=free, whole_budget_set=True
            )
        priced = p > 0
        ratios = np.where(priced, a / np.where(priced, p, 1.0), -np.inf)
        best = ratios.max()
        support = tuple(np.nonzero(ratios >= best * (1.0 - _TIE_RTOL))[0])
        bundle = np.zeros(u.m)
        bundle[support[0]] = budget / p[support[0]]
        return DemandResult(bundle=bundle, support=support, free=free)

    # Cobb-Douglas
    desired = a > 0
    free_desired = desired & (p == 0)
    if np.any(free_desired):
        if budget > 0:
            raise UnboundedDemandError(
                "a positive-weight commodity has zero price and budget > 0"
            )
        if not np.any(desired & (p > 0)):
            # all desired commodities are free: utility is unbounded even
            # with zero budget
            raise UnboundedDemandError("all desired commodities are free")
    bundle = np.zeros(u.m)
    priced_desired = desired & (p > 0)
    if budget > 0:
        bundle[priced_desired] = a[priced_desired] * budget / p[priced_desired]
    free = tuple(np.nonzero((p == 0) & ~priced_desired)[0])
    return DemandResult(bundle=bundle, free=free)


def excess_demand(economy: Economy, reports: ReportProfile, p) -> np.ndarray:
    """z_j(p) = sum_i x_ij(p, p.e_i) - 1 (supply normalized to 1).

    Raises when any agent's demand is correspondence-valued or unbounded;
    `is_equilibrium` is the arbiter for those cases.
    """
    if reports.n != economy.n:
        raise ValueError("report count does not match agent count")
    p = np.asarray(p, dtype=float)
    total = np.zeros(economy.m)
    for i in range(economy.n):
        budget = float(economy.endowments[i] @ p)
        d = demand(reports.reports[i], p, budget)
        if not d.single_valued:
            raise MultiValuedDemandError(
                f"agent {i}: demand is correspondence-valued at these prices"
            )
        total += d.bundle
    return total - economy.endowments.sum(axis=0)


# ---------------------------------------------------------------------------
# equilibrium verification


def max_utility_on_budget_set(u: UtilityFunction, p, budget: float) -> float:
    """Analytic maximum of u over {x >= 0 : p.x <= budget}.

    Returns inf when the supremum is unbounded (a desired free commodity
    with the means to exploit it).
    """
    p = np.asarray(p, dtype=float)
    _check_price_budget(p, budget, u.m)
    a = u.alpha

    if u.kind is UtilityKind.LINEAR:
        if not np.any(a > 0):
            return 0.0
        if np.any((a > 0) & (p == 0)):
            return np.inf
        priced = p > 0
        return float(budget * np.max(a[priced] / p[priced]))

    if u.kind is UtilityKind.LEONTIEF:
        denom = float(p @ a)
        if denom <= 0.0:
            return np.inf
        return budget / denom

    desired = a > 0
    if np.any(desired & (p == 0)):
        if budget > 0 or not np.any(desired & (p > 0)):
            return np.inf
        return 0.0
    if budget == 0.0:
        return 0.0
    ratios = a[desired] / p[desired]
    return float(budget * np.prod(ratios ** a[desired]))


@dataclass(frozen=True)
class EquilibriumCheck:
    ok: bool
    clearing_residual: np.ndarray
    budget_residual: np.ndarray
    optimality_gap: np.ndarray
    failures: tuple[str, ...] = field(default=())

    @property
    def max_clearing_residual(self) -> float:
        return float(np.abs(self.clearing_residual).max())


def is_equilibrium(
    economy: Economy,
    reports: ReportProfile,
    prices,
    allocation,
    tol: float = DEFAULT_TOL,
) -> EquilibriumCheck:
    """Verify (prices, allocation) as a competitive equilibrium of `reports`.

    Checks (a) market clearing per commodity, (b) budget feasibility per
    agent, (c) per-agent optimality against the analytic budget-set
    maximum. Handles the degenerate corners that `excess_demand` rejects,
    so correspondence-valued examples can be certified here.
    """
    if reports.n != economy.n:
        raise ValueError("report count does not match agent count")
    p = np.asarray(prices, dtype=float)
    x = np.asarray(allocation, dtype=float)
    if x.shape != (economy.n, economy.m):
        raise ValueError(f"allocation has shape {x.shape}")
    _check_price_budget(p, 0.0, economy.m)
    failures = []

    clearing = x.sum(axis=0) - economy.endowments.sum(axis=0)
    if np.abs(clearing).max() > tol:
        failures.append(f"clearing residual {np.abs(clearing).max():.3e} > {tol}")
    if np.any(x < -tol):
        failures.append("negative allocation entry")

    budgets = economy.endowments @ p
    budget_residual = x @ p - budgets
    for i, r in enumerate(budget_residual):
        if r > tol:
            failures.append(f"agent {i} overspends by {r:.3e}")

    gaps = np.zeros(economy.n)
    for i in range(economy.n):
        best = max_utility_on_budget_set(reports.reports[i], p, float(budgets[i]))
        attained = utility_eval(reports.reports[i], np.maximum(x[i], 0.0))
        gaps[i] = best - attained
        if not gaps[i] <= tol:
            failures.append(
                f"agent {i} not at optimum: attains {attained:.6g}, "
                f"budget-set max {best:.6g}"
            )

    return EquilibriumCheck(
        ok=not failures,
        clearing_residual=clearing,
        budget_residual=budget_residual,
        optimality_gap=gaps,
        failures=tuple(failures),
    )
