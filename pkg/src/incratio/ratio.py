"""The incentive ratio: how much utility an agent gains by misreporting.

The ratio of agent i is max over reported exponent vectors alpha' of
u_i(x_i') / u_i(x_i), where x_i is the agent's bundle at the truthful
equilibrium, x_i' its bundle at the equilibrium induced by reporting
alpha' (everyone else truthful), and both bundles are valued by the TRUE
utility. For Cobb-Douglas markets under positivity and strong
competitiveness the equilibria are unique, so the definition's inner
max/min over equilibrium sets collapse and the search is a clean
maximization over the exponent simplex.

This module provides that search (`incentive_ratio_cd`, grid plus
derivative-free pattern refinement, with the per-candidate equilibrium
solves delegated to the compiled kernel), the closed-form 2x2 ratio, the
three analytic witness families whose ratios diverge as their parameter
shrinks (certifying unboundedness without the interiority assumptions),
and the empirical verification of the commodity-count upper bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import AssumptionViolationError, BoundViolationError, DegenerateMarketError
from .markets import (
    Economy,
    Equilibrium,
    EquilibriumCheck,
    ReportProfile,
    SolverConfig,
    UtilityFunction,
    UtilityKind,
    assumption1_violations,
    is_equilibrium,
    utility_eval,
)
from .sampling import sample_cd_economy, sample_simplex
from .simplex import simplex_grid, transfer_directions
from .solvers import EquilibriumSet, solve_cobb_douglas

E_TO_THE_1_OVER_E = math.exp(1.0 / math.e)   # 2-commodity ratio bound, ~1.4447

_MIN_EXPONENT = 1e-9


@dataclass(frozen=True)
class OptimizerConfig:
    """Search settings for the misreport optimizer."""

    grid_resolution: int = 21       # lattice points per simplex dimension
    refine_iterations: int = 200    # pattern-search rounds after the grid
    refine_shrink: float = 0.5      # step multiplier when no move improves
    seed: int = 0                   # seeds the extra random candidates
    random_candidates: int = 64

    def __post_init__(self):
        if self.grid_resolution < 2:
            raise ValueError("grid_resolution must be >= 2")
        if not 0.0 < self.refine_shrink < 1.0:
            raise ValueError("refine_shrink must lie in (0, 1)")


@dataclass(frozen=True)
class RatioQuery:
    economy: Economy
    agent_index: int
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def __post_init__(self):
        if not 0 <= self.agent_index < self.economy.n:
            raise ValueError("agent_index out of range")


@dataclass(frozen=True)
class TraceEntry:
    alpha: tuple[float, ...]
    utility: float
    note: str = ""


@dataclass(frozen=True)
class RatioResult:
    truthful_equilibrium: Equilibrium
    truthful_utility: float
    best_report: UtilityFunction
    deviant_equilibrium: Equilibrium
    deviant_utility: float            # valued under the TRUE utility
    ratio: float
    trace: tuple[TraceEntry, ...]


def _prepare_candidates(cands: np.ndarray, others_cover: np.ndarray):
    """Enforce strong competitiveness on candidate reports.

    A candidate may abandon a commodity (zero exponent) only if some
    other agent reports positive weight on it. On commodities nobody
    else demands, coordinates below the 1e-9 interiority floor are
    raised to the floor and the vector renormalized; the offending
    original is recorded as skipped.
    """
    needs_floor = ~others_cover[None, :] & (cands < _MIN_EXPONENT)
    bad = needs_floor.any(axis=1)
    skipped = cands[bad]
    if skipped.size:
        lifted = np.where(needs_floor[bad], _MIN_EXPONENT, cands[bad])
        lifted /= lifted.sum(axis=1, keepdims=True)
        cands = cands.copy()
        cands[bad] = lifted
    return cands, skipped


def _search_misreport(economy: Economy, agent: int, opt: OptimizerConfig):
    """Grid + pattern search over the agent's exponent simplex.

    Returns (best_alpha, trace). Utilities along the way come from the
    batch kernel; the caller recomputes the winner through the canonical
    solver.
    """
    endow = np.asarray(economy.endowments, dtype=float)
    alphas = economy.alpha_matrix()
    alpha_true = alphas[agent]
    others = np.delete(np.arange(economy.n), agent)
    others_cover = (alphas[others] > 0).any(axis=0)
    trace: list[TraceEntry] = []

    def evaluate(cands: np.ndarray):
        cands, skipped = _prepare_candidates(cands, others_cover)
        utilities = kernels.batch_eval(endow, alphas, agent, cands, alpha_true)
        trace.extend(
            TraceEntry(tuple(c), float(u)) for c, u in zip(cands, utilities)
        )
        trace.extend(
            TraceEntry(
                tuple(s),
                float("nan"),
                "strong competitiveness violated; interior-clipped variant evaluated",
            )
            for s in skipped
        )
        return cands, utilities

    rng = np.random.default_rng(opt.seed)
    grid = simplex_grid(economy.m, opt.grid_resolution)
    extra = [alpha_true[None, :]]
    if opt.random_candidates:
        extra.append(
            np.vstack(
                [sample_simplex(rng, economy.m) for _ in range(opt.random_candidates)]
            )
        )
    cands, utilities = evaluate(np.vstack([grid] + extra))
    if not np.isfinite(utilities).any():
        raise DegenerateMarketError("no candidate report produced a valid market")
    best_idx = int(np.nanargmax(utilities))
    best_alpha = cands[best_idx].copy()
    best_val = utilities[best_idx]

    dirs = transfer_directions(economy.m)
    step = 1.0 / (opt.grid_resolution - 1)
    for _ in range(opt.refine_iterations):
        moves = best_alpha[None, :] + step * dirs
        moves = np.maximum(moves, 0.0)
        moves /= moves.sum(axis=1, keepdims=True)
        moves, vals = evaluate(moves)
        k = int(np.nanargmax(vals)) if np.isfinite(vals).any() else 0
        if np.isfinite(vals[k]) and vals[k] > best_val:
            best_val = vals[k]
            best_alpha = moves[k]
        else:
            step *= opt.refine_shrink
            if step < 1e-12:
                break
    return best_alpha, trace


def incentive_ratio_cd(
    query: RatioQuery, config: SolverConfig | None = None
) -> RatioResult:
    """Best misreport gain for one agent of a Cobb-Douglas economy.

    Positivity and strong competitiveness are required (and re-validated
    per candidate report). One-agent and one-commodity economies are
    degenerate: the equilibrium allocation is report-independent, so the
    ratio is exactly 1.
    """
    economy = query.economy
    if economy.kind is not UtilityKind.COBB_DOUGLAS:
        raise ValueError("incentive_ratio_cd requires a Cobb-Douglas economy")
    truthful_reports = ReportProfile.truthful(economy)
    violations = assumption1_violations(economy, truthful_reports)
    if violations:
        raise AssumptionViolationError(violations)

    agent = query.agent_index
    truthful_eq = solve_cobb_douglas(economy, truthful_reports, config)
    true_u = economy.utilities[agent]
    truthful_utility = utility_eval(true_u, truthful_eq.allocation[agent])
    if truthful_utility <= 0.0:
        raise DegenerateMarketError("zero truthful utility; ratio undefined")

    if economy.n == 1 or economy.m == 1:
        return RatioResult(
            truthful_equilibrium=truthful_eq,
            truthful_utility=truthful_utility,
            best_report=true_u,
            deviant_equilibrium=truthful_eq,
            deviant_utility=truthful_utility,
            ratio=1.0,
            trace=(
                TraceEntry(
                    tuple(true_u.alpha),
                    truthful_utility,
                    "degenerate dimension: allocation is report-independent",
                ),
            ),
        )

    best_alpha, trace = _search_misreport(economy, agent, query.optimizer)
    best_report = UtilityFunction.cobb_douglas(best_alpha)
    deviant_eq = solve_cobb_douglas(
        economy, truthful_reports.replace(agent, best_report), config
    )
    deviant_utility = utility_eval(true_u, deviant_eq.allocation[agent])
    if deviant_utility <= truthful_utility:
        # the truthful report is itself in the search space
        best_report = true_u
        deviant_eq = truthful_eq
        deviant_utility = truthful_utility
    return RatioResult(
        truthful_equilibrium=truthful_eq,
        truthful_utility=truthful_utility,
        best_report=best_report,
        deviant_equilibrium=deviant_eq,
        deviant_utility=deviant_utility,
        ratio=deviant_utility / truthful_utility,
        trace=tuple(trace),
    )


# ---------------------------------------------------------------------------
# closed-form 2x2 ratio


@dataclass(frozen=True)
class ClosedFormRatio:
    T1: float
    T2: float
    ratio: float


def ratio_closed_form_2x2(
    alpha: float, alpha_dev: float, beta: float, e11: float, e12: float
) -> ClosedFormRatio:
    """Closed-form misreport gain in the 2-agent, 2-commodity market.

    Agent 1 truly weights commodity 1 by `alpha`, reports `alpha_dev`;
    agent 2 weights it by `beta`; endowments are (e11, e12) and the
    complement. T1 and T2 are the factors by which the deviation scales
    the agent's two bundle components, and ratio = T1**alpha *
    T2**(1 - alpha).
    """
    for name, v in (
        ("alpha", alpha),
        ("alpha_dev", alpha_dev),
        ("beta", beta),
        ("e11", e11),
        ("e12", e12),
    ):
        if not 0.0 < v < 1.0:
            raise ValueError(f"{name} = {v} outside (0, 1)")
    e21, e22 = 1.0 - e11, 1.0 - e12
    T1 = alpha_dev * (alpha * e12 + beta * e22) / (alpha * (alpha_dev * e12 + beta * e22))
    T2 = (
        (1.0 - alpha_dev)
        * (1.0 - alpha * e11 - beta * e21)
        / ((1.0 - alpha) * (1.0 - alpha_dev * e11 - beta * e21))
    )
    return ClosedFormRatio(T1=T1, T2=T2, ratio=T1**alpha * T2 ** (1.0 - alpha))


# ---------------------------------------------------------------------------
# witness families (divergent ratios without the interiority assumptions)


@dataclass(frozen=True)
class WitnessResult:
    economy: Economy
    reports: ReportProfile
    equilibria: EquilibriumSet
    checks: tuple[EquilibriumCheck, ...]
    ratio: float


@dataclass(frozen=True)
class CdWitnessResult:
    economy: Economy
    truthful_reports: ReportProfile
    deviant_reports: ReportProfile
    truthful: Equilibrium
    deviant: Equilibrium
    truthful_check: EquilibriumCheck
    deviant_check: EquilibriumCheck
    ratio: float


def witness_linear(epsilon: float) -> WitnessResult:
    """Linear market whose equilibrium multiplicity yields ratio 1/epsilon.

    Agent 1 owns (eps, 1-eps) and cares only about commodity 1; agent 2
    owns the complement and cares about nothing (the all-zero linear
    utility). Both constructed equilibria are valid under the same
    truthful reports; the ratio is driven purely by which one is
    selected.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    economy = Economy(
        endowments=[[epsilon, 1.0 - epsilon], [1.0 - epsilon, epsilon]],
        utilities=(
            UtilityFunction.linear([1.0, 0.0]),
            UtilityFunction.linear([0.0, 0.0]),
        ),
    )
    reports = ReportProfile.truthful(economy)
    low = Equilibrium.assemble(
        economy,
        [1.0, 0.0],
        [[epsilon, 1.0 - epsilon], [1.0 - epsilon, epsilon]],
    )
    high = Equilibrium.assemble(
        economy, [1.0, 1.0], [[1.0, 0.0], [0.0, 1.0]]
    )
    checks = tuple(
        is_equilibrium(economy, reports, eq.prices, eq.allocation)
        for eq in (low, high)
    )
    return WitnessResult(
        economy=economy,
        reports=reports,
        equilibria=EquilibriumSet(members=(low, high), exhaustive=False),
        checks=checks,
        ratio=1.0 / epsilon,
    )


def witness_leontief(epsilon: float, delta: float) -> WitnessResult:
    """Leontief market with a continuum of price rays.

    Both agents want the commodities in 1:1 proportion; endowments are
    (1-eps, eps) and its mirror. Every price ray clears, and moving the
    selected ray from (delta, 1) to (1, 1) scales agent 1's utility by
    (1 + delta) / (2 (eps + delta - delta * eps)).
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    economy = Economy(
        endowments=[[1.0 - epsilon, epsilon], [epsilon, 1.0 - epsilon]],
        utilities=(
            UtilityFunction.leontief([1.0, 1.0]),
            UtilityFunction.leontief([1.0, 1.0]),
        ),
    )
    reports = ReportProfile.truthful(economy)
    t1 = (epsilon + delta - delta * epsilon) / (1.0 + delta)
    t2 = (1.0 - epsilon + delta * epsilon) / (1.0 + delta)
    skewed = Equilibrium.assemble(
        economy, [delta, 1.0], [[t1, t1], [t2, t2]]
    )
    even = Equilibrium.assemble(
        economy, [1.0, 1.0], [[0.5, 0.5], [0.5, 0.5]]
    )
    checks = tuple(
        is_equilibrium(economy, reports, eq.prices, eq.allocation)
        for eq in (skewed, even)
    )
    return WitnessResult(
        economy=economy,
        reports=reports,
        equilibria=EquilibriumSet(
            members=(skewed, even),
            exhaustive=False,
            family_note="every price ray clears in this market",
        ),
        checks=checks,
        ratio=(1.0 + delta) / (2.0 * (epsilon + delta - delta * epsilon)),
    )


def witness_cd(epsilon: float) -> CdWitnessResult:
    """Cobb-Douglas witness: misreporting wipes out the rival's budget.

    Agent 1 owns all of commodity 1 and values both commodities equally;
    agent 2 owns all of commodity 2 and puts weight eps on commodity 1.
    Reporting all weight on commodity 1 drives its rival's endowment
    value to zero, multiplying agent 1's true utility by sqrt(2/eps).
    Positivity of endowments fails here by construction.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    economy = Economy(
        endowments=[[1.0, 0.0], [0.0, 1.0]],
        utilities=(
            UtilityFunction.cobb_douglas([0.5, 0.5]),
            UtilityFunction.cobb_douglas([epsilon, 1.0 - epsilon]),
        ),
    )
    truthful_reports = ReportProfile.truthful(economy)
    deviant_reports = truthful_reports.replace(
        0, UtilityFunction.cobb_douglas([1.0, 0.0])
    )
    truthful = Equilibrium.assemble(
        economy,
        [1.0, 1.0 / (2.0 * epsilon)],
        [[0.5, epsilon], [0.5, 1.0 - epsilon]],
    )
    deviant = Equilibrium.assemble(
        economy, [1.0, 0.0], [[1.0, 1.0], [0.0, 0.0]]
    )
    return CdWitnessResult(
        economy=economy,
        truthful_reports=truthful_reports,
        deviant_reports=deviant_reports,
        truthful=truthful,
        deviant=deviant,
        truthful_check=is_equilibrium(
            economy, truthful_reports, truthful.prices, truthful.allocation
        ),
        deviant_check=is_equilibrium(
            economy, deviant_reports, deviant.prices, deviant.allocation
        ),
        ratio=math.sqrt(2.0 / epsilon),
    )


# ---------------------------------------------------------------------------
# bound verification


@dataclass(frozen=True)
class UpperBoundConfig:
    n: int
    m: int
    samples: int = 200
    seed: int = 0
    concentration: float = 0.6
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    include_reference: bool = False   # prepend the bundled reference market
    tolerance: float = 1e-6


@dataclass(frozen=True)
class UpperBoundReport:
    n: int
    m: int
    samples: int
    seed: int
    bound: float
    max_ratio: float
    argmax_economy: Economy
    argmax_agent: int
    ratios: tuple[float, ...]

    @property
    def passed(self) -> bool:
        return self.max_ratio <= self.bound


def _bound_for(m: int) -> float:
    # the 2-commodity case obeys the tighter exp(1/e) bound
    return E_TO_THE_1_OVER_E if m == 2 else float(m)


def verify_upper_bound_m(config: UpperBoundConfig) -> UpperBoundReport:
    """Sample markets, maximize the ratio per sample, assert the bound.

    The bound is the commodity count m (exp(1/e) when m == 2); a
    violation raises BoundViolationError, which would falsify the theory
    this package reproduces and therefore must never fire.
    """
    rng = np.random.default_rng(config.seed)
    economies = []
    if config.include_reference:
        from .reference import reference_economy

        ref = reference_economy()
        if (ref.n, ref.m) == (config.n, config.m):
            economies.append(ref)
    while len(economies) < config.samples:
        economies.append(
            sample_cd_economy(rng, config.n, config.m, config.concentration)
        )

    bound = _bound_for(config.m) + config.tolerance
    ratios = []
    best = (-np.inf, None, 0)
    for econ in economies:
        for agent in range(config.n):
            result = incentive_ratio_cd(
                RatioQuery(economy=econ, agent_index=agent, optimizer=config.optimizer)
            )
            ratios.append(result.ratio)
            if result.ratio > best[0]:
                best = (result.ratio, econ, agent)
            if result.ratio > bound:
                raise BoundViolationError(
                    f"ratio {result.ratio} exceeds bound {bound} for "
                    f"n={config.n}, m={config.m}, agent {agent}"
                )
    return UpperBoundReport(
        n=config.n,
        m=config.m,
        samples=len(economies),
        seed=config.seed,
        bound=bound,
        max_ratio=float(best[0]),
        argmax_economy=best[1],
        argmax_agent=best[2],
        ratios=tuple(ratios),
    )


# ---------------------------------------------------------------------------
# the power inequality used by the 2x2 bound proof


@dataclass(frozen=True)
class PowerInequalityReport:
    n_samples: int
    max_violation: float   # max of x**y - exp(x*y/e); negative means slack
    passed: bool


def check_power_inequality(samples=10_000, seed: int = 0) -> PowerInequalityReport:
    """Check x**y <= exp(x*y/e) + 1e-12 on [0, 10]^2 (0**0 == 1).

    `samples` is either a sample count (drawn uniformly with `seed`) or an
    explicit (N, 2) array of (x, y) pairs.
    """
    if np.isscalar(samples):
        rng = np.random.default_rng(seed)
        pts = rng.uniform(0.0, 10.0, size=(int(samples), 2))
    else:
        pts = np.asarray(samples, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("explicit samples must have shape (N, 2)")
    lhs = np.power(pts[:, 0], pts[:, 1])
    rhs = np.exp(pts[:, 0] * pts[:, 1] / np.e)
    worst = float((lhs - rhs).max())
    return PowerInequalityReport(
        n_samples=len(pts), max_violation=worst, passed=worst <= 1e-12
    )
