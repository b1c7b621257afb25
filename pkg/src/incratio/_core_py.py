"""Pure-numpy implementation of the hot misreport-evaluation kernel.

Fallback for `incratio.kernels` when the compiled extension is not
available; fully vectorized over candidate batches so the ratio search
stays usable without a compiler.
"""
from __future__ import annotations

import numpy as np

BACKEND = "python"

_SIGN_RTOL = 1e-9


def cd_batch_eval(endow, alphas, agent, cands, alpha_true):
    """True utility agent `agent` obtains at each candidate report.

    For every row of `cands` (a reported exponent vector for `agent`,
    others reporting `alphas`), solves the Cobb-Douglas equilibrium via
    the first adjugate row of the spending matrix, computes the agent's
    closed-form demand bundle and evaluates it under `alpha_true`.
    Candidates with a mixed-sign price row (degenerate markets) get NaN.

    Returns an array of shape (len(cands),).
    """
    endow = np.ascontiguousarray(endow, dtype=float)
    cands = np.ascontiguousarray(cands, dtype=float)
    alphas = np.asarray(alphas, dtype=float)
    alpha_true = np.asarray(alpha_true, dtype=float)
    n, m = endow.shape
    K = cands.shape[0]
    e_a = endow[agent]

    others = np.ones(n, dtype=bool)
    others[agent] = False
    base = endow[others].T @ alphas[others]          # (m, m)

    M = np.broadcast_to(base, (K, m, m)).copy()
    M += e_a[None, :, None] * cands[:, None, :]
    M[:, np.arange(m), np.arange(m)] -= 1.0

    # first adjugate row: signed minors from deleting column 0 and row j
    prices = np.empty((K, m))
    if m == 1:
        prices[:] = 1.0
    else:
        rows = np.arange(m)
        for j in range(m):
            minor = M[:, rows[rows != j], 1:]
            prices[:, j] = (-1.0) ** j * np.linalg.det(minor)

    scale = np.abs(prices).max(axis=1)
    lead = np.take_along_axis(
        prices, np.abs(prices).argmax(axis=1)[:, None], axis=1
    )[:, 0]
    prices = np.where(lead[:, None] < 0, -prices, prices)
    valid = (scale > 0) & (prices.min(axis=1) >= -_SIGN_RTOL * scale)
    prices = np.maximum(prices, 0.0)

    budgets = prices @ e_a                            # (K,)
    with np.errstate(divide="ignore", invalid="ignore"):
        x = cands * budgets[:, None] / prices
    x[cands == 0.0] = 0.0

    with np.errstate(divide="ignore", invalid="ignore"):
        utilities = np.prod(np.power(x, alpha_true[None, :]), axis=1)
    utilities[~valid] = np.nan
    return utilities
