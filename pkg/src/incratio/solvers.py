"""Equilibrium computation for the three utility families.

Cobb-Douglas markets under positivity + strong competitiveness have a
unique equilibrium price ray, obtained directly from the adjugate of the
spending matrix (`solve_cobb_douglas`); a damped fixed-point iteration on
market spending (`cd_fixed_point_price`) is kept as an alternative route
and the two must agree. Leontief markets are solved by multi-start damped
price adjustment with continuum detection, linear markets by a desk-scale
grid-plus-LP heuristic, and `brute_force_equilibrium` is the deliberately
dumb residual-minimizing grid oracle used to cross-validate the
closed-form paths in tests.

Prices are handled on the unit simplex internally; published-number
comparisons should use ratios p_j / p_1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import AssumptionViolationError, SolverError
from .markets import (
    Economy,
    Equilibrium,
    ReportProfile,
    SolverConfig,
    UtilityKind,
    assumption1_violations,
    is_equilibrium,
)
from .simplex import (
    euclidean_project,
    interior_simplex_grid,
    simplex_grid,
    transfer_directions,
)
from .spending import price_from_adjugate

_DEDUP_TOL = 1e-6


@dataclass(frozen=True)
class EquilibriumSet:
    """A collection of verified equilibria.

    `exhaustive` records whether the set is known complete at the search
    resolution (the heuristic solvers always report False). `family_note`
    describes a detected continuum, e.g. when every sampled price ray
    clears.
    """

    members: tuple[Equilibrium, ...]
    exhaustive: bool = False
    family_note: str | None = None


# ---------------------------------------------------------------------------
# Cobb-Douglas


def _require_kind(reports: ReportProfile, kind: UtilityKind, what: str):
    if reports.kind is not kind:
        raise ValueError(f"{what} requires {kind.value} reports")


def _cd_allocation(endowments: np.ndarray, alphas: np.ndarray, p: np.ndarray):
    budgets = endowments @ p
    with np.errstate(divide="ignore", invalid="ignore"):
        x = alphas * budgets[:, None] / p[None, :]
    x[alphas == 0.0] = 0.0
    return x


def solve_cobb_douglas(
    economy: Economy,
    reports: ReportProfile,
    config: SolverConfig | None = None,
) -> Equilibrium:
    """Unique Cobb-Douglas equilibrium via the adjugate price solve.

    Requires strictly positive endowments and strong competitiveness of
    the reports (which make the price ray unique). Prices are returned on
    the unit simplex; any positive rescaling is equivalent.
    """
    config = config or SolverConfig()
    _require_kind(reports, UtilityKind.COBB_DOUGLAS, "solve_cobb_douglas")
    violations = assumption1_violations(economy, reports)
    if violations:
        raise AssumptionViolationError(violations)
    p = price_from_adjugate(economy, reports)
    p = p / p.sum()
    x = _cd_allocation(economy.endowments, reports.alpha_matrix(), p)
    eq = Equilibrium.assemble(economy, p, x)
    if eq.max_clearing_residual > config.clearing_tol:
        raise SolverError(
            "closed-form allocation does not clear",
            best_residual=eq.max_clearing_residual,
        )
    return eq


def cd_fixed_point_price(
    economy: Economy,
    reports: ReportProfile,
    tol: float = 1e-14,
    max_iterations: int = 500_000,
) -> np.ndarray:
    """Alternative price route: iterate p <- A (E^T p) to convergence.

    Each step maps prices to the per-commodity spending they induce; the
    equilibrium price ray is the fixed point. Must agree with the
    adjugate route to ~1e-10 after simplex normalization.
    """
    _require_kind(reports, UtilityKind.COBB_DOUGLAS, "cd_fixed_point_price")
    violations = assumption1_violations(economy, reports)
    if violations:
        raise AssumptionViolationError(violations)
    endow = economy.endowments
    alphas = reports.alpha_matrix()
    m = economy.m
    p = np.full(m, 1.0 / m)
    for _ in range(max_iterations):
        p_new = alphas.T @ (endow @ p)
        p_new /= p_new.sum()
        if np.abs(p_new - p).max() < tol:
            return p_new
        p = p_new
    raise SolverError(
        "fixed-point price iteration did not converge",
        best_residual=float(np.abs(p_new - p).max()),
    )


@dataclass(frozen=True)
class Cd2x2Solution:
    p2: float
    x1: np.ndarray
    x2: np.ndarray


def solve_cd_2x2(alpha1: float, beta: float, e11: float, e12: float) -> Cd2x2Solution:
    """Closed form for a 2-agent, 2-commodity Cobb-Douglas market.

    Agent 1 has exponents (alpha1, 1-alpha1) and endowment (e11, e12);
    agent 2 has (beta, 1-beta) and the complementary endowment. Prices
    are normalized to p1 = 1.
    """
    for name, v in (("alpha1", alpha1), ("beta", beta), ("e11", e11), ("e12", e12)):
        if not 0.0 < v < 1.0:
            raise ValueError(f"{name} = {v} outside (0, 1)")
    e21, e22 = 1.0 - e11, 1.0 - e12
    p2 = (1.0 - alpha1 * e11 - beta * e21) / (alpha1 * e12 + beta * e22)
    b1 = e11 + e12 * p2
    b2 = e21 + e22 * p2
    x1 = np.array([alpha1 * b1, (1.0 - alpha1) * b1 / p2])
    x2 = np.array([beta * b2, (1.0 - beta) * b2 / p2])
    return Cd2x2Solution(p2=float(p2), x1=x1, x2=x2)


# ---------------------------------------------------------------------------
# batched excess-demand evaluation (shared by the searches below)


def _cd_z_batch(endow: np.ndarray, alphas: np.ndarray, prices: np.ndarray):
    budgets = prices @ endow.T                      # (K, n)
    return (budgets @ alphas) / prices - 1.0        # (K, m)


def _leontief_z_batch(endow: np.ndarray, alphas: np.ndarray, prices: np.ndarray):
    budgets = prices @ endow.T                      # (K, n)
    scale = budgets / (prices @ alphas.T)           # (K, n)
    return scale @ alphas - 1.0                     # (K, m)


def _z_batch(kind: UtilityKind, endow, alphas, prices):
    if kind is UtilityKind.COBB_DOUGLAS:
        return _cd_z_batch(endow, alphas, prices)
    if kind is UtilityKind.LEONTIEF:
        return _leontief_z_batch(endow, alphas, prices)
    raise ValueError(f"no batched excess demand for {kind.value} markets")


def _pattern_refine(objective, p0: np.ndarray, step0: float, min_step: float = 1e-11):
    """Minimize `objective` over the simplex by pairwise-transfer search.

    Evaluates all moves p +/- step * (e_j - e_k) per round and halves the
    step when none improves. Heuristic: nonsmooth objectives can pin the
    descent cone between the transfer directions, so callers should treat
    a stall as "no candidate found", not as proof of optimality.
    """
    dirs = transfer_directions(p0.size)
    p = p0.copy()
    best = float(objective(p[None, :])[0])
    if not dirs.size:
        return p, best
    step = step0
    while step > min_step:
        cands = p[None, :] + step * dirs
        cands = np.maximum(cands, 0.0)
        cands /= cands.sum(axis=1, keepdims=True)
        vals = objective(cands)
        k = int(np.argmin(vals))
        if vals[k] < best:
            best = float(vals[k])
            p = cands[k]
        else:
            step *= 0.5
    return p, best


def _pattern_refine_log(objective, p0: np.ndarray, step0: float = 0.7,
                        min_step: float = 1e-13):
    """Pairwise-transfer search in log-price space.

    Moves scale coordinate pairs by exp(+/- step), which keeps iterates
    strictly positive and resolves equilibria with widely different price
    magnitudes (tiny prices need tiny absolute but only modest relative
    corrections). Excess demand is homogeneous of degree zero, so the
    simplex renormalization does not disturb the objective.
    """
    dirs = transfer_directions(p0.size)
    p = p0.copy()
    best = float(objective(p[None, :])[0])
    if not dirs.size:
        return p, best
    step = step0
    while step > min_step:
        cands = p[None, :] * np.exp(step * dirs)
        cands /= cands.sum(axis=1, keepdims=True)
        vals = objective(cands)
        k = int(np.argmin(vals))
        if vals[k] < best:
            best = float(vals[k])
            p = cands[k]
        else:
            step *= 0.5
    return p, best


# ---------------------------------------------------------------------------
# brute-force oracle


def brute_force_equilibrium(
    economy: Economy,
    reports: ReportProfile,
    config: SolverConfig | None = None,
) -> Equilibrium:
    """Independent oracle: minimize max_j |z_j(p)| over the price simplex.

    Exhaustive grid search followed by step-halving pairwise refinement;
    no spending-matrix algebra is used anywhere on this path. Intended
    for tests that cross-validate the closed-form solvers.
    """
    config = config or SolverConfig()
    if reports.kind not in (UtilityKind.COBB_DOUGLAS, UtilityKind.LEONTIEF):
        raise ValueError("brute force supports Cobb-Douglas and Leontief markets")
    endow = economy.endowments
    alphas = reports.alpha_matrix()
    kind = reports.kind

    def residual(prices):
        return np.abs(_z_batch(kind, endow, alphas, prices)).max(axis=1)

    def squared(prices):
        # smooth surrogate with the same minimizer (the clearing root);
        # the raw max-residual objective has nonsmooth ties at which
        # pairwise moves can all look non-improving
        return (_z_batch(kind, endow, alphas, prices) ** 2).sum(axis=1)

    if kind is UtilityKind.COBB_DOUGLAS:
        grid = interior_simplex_grid(economy.m, config.grid_resolution)
    else:
        grid = simplex_grid(economy.m, config.grid_resolution)
        grid = grid[(grid @ alphas.T > 0).all(axis=1)]
    vals = residual(grid)
    p0 = grid[int(np.argmin(vals))]
    p, _ = _pattern_refine_log(squared, p0)
    best = float(residual(p[None, :])[0])
    if best > config.clearing_tol:
        raise SolverError("brute-force search residual above tolerance", best)

    if kind is UtilityKind.COBB_DOUGLAS:
        x = _cd_allocation(endow, alphas, p)
    else:
        budgets = endow @ p
        x = (budgets / (alphas @ p))[:, None] * alphas
    return Equilibrium.assemble(economy, p, x)


# ---------------------------------------------------------------------------
# Leontief


def _dedupe_prices(prices: list[np.ndarray]) -> list[np.ndarray]:
    kept: list[np.ndarray] = []
    for p in sorted(prices, key=tuple):
        if all(np.abs(p - q).max() > _DEDUP_TOL for q in kept):
            kept.append(p)
    return kept


def _collinear_continuum(points: np.ndarray, residual, tol: float) -> str | None:
    """Report a continuum when >= 3 collinear clearing prices bracket a
    segment whose interior points also clear."""
    if len(points) < 3:
        return None
    base = points[0]
    span = points - base
    _, svals, vt = np.linalg.svd(span, full_matrices=False)
    if svals.size > 1 and svals[1] > 1e-6 * max(svals[0], 1.0):
        return None
    axis = vt[0]
    coords = span @ axis
    lo, hi = points[int(np.argmin(coords))], points[int(np.argmax(coords))]
    ts = np.linspace(0.1, 0.9, 7)[:, None]
    interior = lo[None, :] * (1 - ts) + hi[None, :] * ts
    if residual(interior).max() <= tol:
        return (
            f"continuum detected: {len(points)} collinear clearing price "
            "vectors whose connecting segment also clears"
        )
    return None


def solve_leontief(
    economy: Economy,
    reports: ReportProfile,
    config: SolverConfig | None = None,
) -> EquilibriumSet:
    """Multi-start damped price adjustment p <- proj(p + step * z(p)).

    Seeds a grid over the price simplex, iterates every seed with a
    per-seed adaptive step, deduplicates the converged prices and flags a
    continuum when three or more collinear solutions bound a segment that
    clears throughout (Leontief equilibria need not be unique).

    Uses the canonical no-waste demand x_i = (p.e_i / p.alpha_i) alpha_i,
    so clearing requires the unit-supply vector to lie in the cone of the
    requirement vectors; markets violating that (typical when n < m) have
    only boundary-price equilibria with free-good waste, which this
    search legitimately reports as no solution found.
    """
    config = config or SolverConfig()
    _require_kind(reports, UtilityKind.LEONTIEF, "solve_leontief")
    endow = economy.endowments
    alphas = reports.alpha_matrix()

    def residual(prices):
        return np.abs(_leontief_z_batch(endow, alphas, prices)).max(axis=1)

    seeds = simplex_grid(economy.m, config.grid_resolution)
    seeds = seeds[(seeds @ alphas.T > 0).all(axis=1)]
    if config.price_floor > 0:
        seeds = seeds[(seeds >= config.price_floor).all(axis=1)]
    P = seeds.copy()
    steps = np.full(len(P), 0.25)
    res = residual(P)
    for _ in range(config.max_iterations):
        active = (res > config.clearing_tol) & (steps > 1e-12)
        if not active.any():
            break
        z = _leontief_z_batch(endow, alphas, P[active])
        trial = P[active] + steps[active, None] * z
        trial = np.vstack([euclidean_project(row) for row in trial])
        bad = ~(trial @ alphas.T > 0).all(axis=1)
        trial[bad] = P[active][bad]
        new_res = residual(trial)
        improved = new_res < res[active]
        idx = np.nonzero(active)[0]
        P[idx[improved]] = trial[improved]
        res[idx[improved]] = new_res[improved]
        steps[idx[~improved]] *= 0.5

    converged = [P[k] for k in range(len(P)) if res[k] <= config.clearing_tol]
    if not converged:
        raise SolverError(
            "no Leontief equilibrium found at this resolution",
            best_residual=float(res.min()),
        )
    distinct = _dedupe_prices(converged)

    members = []
    for p in distinct:
        budgets = endow @ p
        x = (budgets / (alphas @ p))[:, None] * alphas
        members.append(Equilibrium.assemble(economy, p, x))
    note = _collinear_continuum(np.vstack(distinct), residual, config.clearing_tol)
    return EquilibriumSet(members=tuple(members), exhaustive=False, family_note=note)


# ---------------------------------------------------------------------------
# linear (desk scale)


def _linear_clearing_slack(endow, alphas, p, tol):
    """LP: minimal total clearing slack when every agent spends its budget
    across its bang-per-buck support. Returns (slack, allocation|None).

    Returns (inf, None) when some agent desires a zero-price commodity
    (demand unbounded, so no equilibrium at these prices).
    """
    n, m = endow.shape
    if np.any((alphas > 0) & (p[None, :] == 0)):
        return np.inf, None
    budgets = endow @ p
    priced = p > 0

    # variables: x (n*m) then clearing slacks s+ (m), s- (m)
    n_x = n * m
    c = np.concatenate([np.zeros(n_x), np.ones(2 * m)])
    A_eq = []
    b_eq = []
    for j in range(m):
        row = np.zeros(n_x + 2 * m)
        row[j::m] = 1.0
        row[n_x + j] = 1.0
        row[n_x + m + j] = -1.0
        A_eq.append(row)
        b_eq.append(1.0)

    bounds = [(0.0, None)] * (n_x + 2 * m)
    A_ub = []
    b_ub = []
    for i in range(n):
        a = alphas[i]
        if np.any(a > 0):
            ratios = np.where(priced, a / np.where(priced, p, 1.0), -np.inf)
            best = ratios.max()
            support = ratios >= best * (1.0 - 1e-12)
            for j in range(m):
                if priced[j] and not support[j]:
                    bounds[i * m + j] = (0.0, 0.0)
            row = np.zeros(n_x + 2 * m)
            row[i * m : (i + 1) * m] = p
            A_eq.append(row)
            b_eq.append(float(budgets[i]))
        else:
            row = np.zeros(n_x + 2 * m)
            row[i * m : (i + 1) * m] = p
            A_ub.append(row)
            b_ub.append(float(budgets[i]))

    result = linprog(
        c,
        A_ub=np.vstack(A_ub) if A_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.vstack(A_eq),
        b_eq=np.array(b_eq),
        bounds=bounds,
        method="highs",
    )
    if not result.success:
        return np.inf, None
    x = result.x[:n_x].reshape(n, m)
    return float(result.fun), x


def solve_linear_smallscale(
    economy: Economy,
    reports: ReportProfile,
    config: SolverConfig | None = None,
) -> EquilibriumSet:
    """Heuristic linear-market solver for desk-scale instances (n, m <= 4).

    Walks a price-simplex grid; at each price vector the bang-per-buck
    supports define a clearing feasibility LP (ties are kept as genuine
    degrees of freedom, and zero-price commodities may be absorbed
    freely). Grid prices with zero slack become candidates directly;
    otherwise the best grid points are refined by step-halving local
    search on the LP slack. Every candidate is certified with
    `is_equilibrium` before being returned. The set is never claimed
    exhaustive.
    """
    config = config or SolverConfig()
    _require_kind(reports, UtilityKind.LINEAR, "solve_linear_smallscale")
    endow = economy.endowments
    alphas = reports.alpha_matrix()
    tol = config.clearing_tol

    def slack_only(prices):
        return np.array(
            [_linear_clearing_slack(endow, alphas, p, tol)[0] for p in prices]
        )

    grid = simplex_grid(economy.m, config.grid_resolution)
    if config.price_floor > 0:
        grid = grid[(grid >= config.price_floor).all(axis=1)]
    slacks = slack_only(grid)
    candidates = [grid[k] for k in np.nonzero(slacks <= tol)[0]]

    # refine the most-promising infeasible grid points toward off-grid
    # equilibria
    finite = np.nonzero(np.isfinite(slacks) & (slacks > tol))[0]
    order = finite[np.argsort(slacks[finite])][:3]
    step0 = 1.0 / (config.grid_resolution - 1)
    for k in order:
        p, s = _pattern_refine(slack_only, grid[k], step0, min_step=1e-10)
        if s <= tol:
            candidates.append(p)

    members = []
    for p in _dedupe_prices(candidates):
        slack, x = _linear_clearing_slack(endow, alphas, p, tol)
        if x is None or slack > tol:
            continue
        check = is_equilibrium(economy, reports, p, x, tol=max(tol, 1e-7))
        if check.ok:
            members.append(Equilibrium.assemble(economy, p, x))
    return EquilibriumSet(members=tuple(members), exhaustive=False)
