"""Spending-matrix algebra for Cobb-Douglas markets.

At equilibrium the price vector p of a Cobb-Douglas market satisfies
p^T (E A^T - I_m) = 0, where column i of the m x n matrices E and A holds
agent i's endowment and reported exponents. The rows of the adjugate of
E A^T - I_m therefore span the (one-dimensional, under positivity and
strong competitiveness) left null space, which gives a direct,
iteration-free price solve. Replacing the first column of the matrix by
an agent's endowment vector and taking the determinant yields that
agent's budget up to the shared proportionality constant; remarkably, the
value is invariant under any simplex-preserving change of that agent's
own reported exponents.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMarketError
from .markets import Economy, ReportProfile, UtilityKind

_SIGN_RTOL = 1e-9


@dataclass(frozen=True)
class SpendingMatrix:
    """The m x m matrix with entries sum_i e_ij * alpha_ik - [j == k]."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("spending matrix must be square")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def m(self) -> int:
        return self.entries.shape[0]


def _require_cobb_douglas(reports: ReportProfile):
    if reports.kind is not UtilityKind.COBB_DOUGLAS:
        raise ValueError("spending-matrix analysis requires Cobb-Douglas reports")


def build_spending_matrix(economy: Economy, reports: ReportProfile) -> SpendingMatrix:
    _require_cobb_douglas(reports)
    if reports.n != economy.n:
        raise ValueError("report count does not match agent count")
    alphas = reports.alpha_matrix()
    m = economy.m
    return SpendingMatrix(economy.endowments.T @ alphas - np.eye(m))


def adjugate(matrix) -> np.ndarray:
    """Classical adjugate via signed cofactors; Adj of a 1x1 matrix is [[1]].

    Satisfies M @ adjugate(M) == det(M) * I.
    """
    M = np.asarray(matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("adjugate requires a square matrix")
    m = M.shape[0]
    if m == 1:
        return np.ones((1, 1))
    cof = np.empty((m, m))
    rows = np.arange(m)
    for i in range(m):
        sub_rows = rows[rows != i]
        for j in range(m):
            minor = M[np.ix_(sub_rows, rows[rows != j])]
            cof[i, j] = (-1.0) ** (i + j) * np.linalg.det(minor)
    return cof.T


def _first_adjugate_row(M: np.ndarray) -> np.ndarray:
    """Row 0 of the adjugate: signed minors obtained by deleting column 0."""
    m = M.shape[0]
    if m == 1:
        return np.ones(1)
    rows = np.arange(m)
    out = np.empty(m)
    for j in range(m):
        minor = M[np.ix_(rows[rows != j], rows[1:])]
        out[j] = (-1.0) ** j * np.linalg.det(minor)
    return out


def _sign_fix_nonnegative(row: np.ndarray) -> np.ndarray:
    scale = np.abs(row).max()
    if scale == 0.0:
        raise DegenerateMarketError("adjugate row is identically zero")
    fixed = row.copy()
    nonzero = np.nonzero(np.abs(fixed) > _SIGN_RTOL * scale)[0]
    if fixed[nonzero[0]] < 0:
        fixed = -fixed
    if np.any(fixed < -_SIGN_RTOL * scale):
        raise DegenerateMarketError(
            "adjugate row has mixed signs; positivity or strong "
            "competitiveness likely fails"
        )
    return np.maximum(fixed, 0.0)


def price_from_adjugate(economy: Economy, reports: ReportProfile) -> np.ndarray:
    """Equilibrium price ray from the first adjugate row, sign-fixed >= 0."""
    M = build_spending_matrix(economy, reports).entries
    return _sign_fix_nonnegative(_first_adjugate_row(M))


def budget_determinant(economy: Economy, reports: ReportProfile, agent_index: int) -> float:
    """det of the spending matrix with column 0 replaced by e_i.

    Equals c * (p . e_i) for the adjugate proportionality constant c, and
    is invariant under any simplex-preserving change of agent i's own
    report.
    """
    if not 0 <= agent_index < economy.n:
        raise ValueError("agent_index out of range")
    M = build_spending_matrix(economy, reports).entries.copy()
    M[:, 0] = economy.endowments[agent_index]
    return float(np.linalg.det(M))


def check_budget_invariance(
    economy: Economy,
    truthful_reports: ReportProfile,
    deviant_reports: ReportProfile,
    agent_index: int,
) -> float:
    """|budget determinant truthful - deviant| for a single-agent deviation."""
    _require_cobb_douglas(truthful_reports)
    _require_cobb_douglas(deviant_reports)
    for i in range(truthful_reports.n):
        if i == agent_index:
            continue
        if not np.array_equal(
            truthful_reports.reports[i].alpha, deviant_reports.reports[i].alpha
        ):
            raise ValueError("reports differ at more than one agent")
    dt = budget_determinant(economy, truthful_reports, agent_index)
    dd = budget_determinant(economy, deviant_reports, agent_index)
    return abs(dt - dd)


def concentration_bound(alpha) -> float:
    """prod over alpha_j > 0 of (1/alpha_j) ** alpha_j; always in [1, m].

    Zero weights contribute a factor 1 (their limit value). Equals m
    exactly for uniform weights and 1 for a point mass.
    """
    a = np.asarray(alpha, dtype=float)
    if np.any(a < 0) or abs(a.sum() - 1.0) > 1e-9:
        raise ValueError("alpha must lie on the unit simplex")
    pos = a[a > 0]
    return float(np.prod((1.0 / pos) ** pos))
