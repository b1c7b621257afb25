"""Random market generation for property sweeps.

Endowment columns and exponent rows are drawn from symmetric Dirichlet
distributions; rejection enforces an interiority floor (so positivity and
strong competitiveness hold robustly rather than merely almost surely).
"""
from __future__ import annotations

import numpy as np

from .markets import Economy, UtilityFunction


def sample_simplex(
    rng: np.random.Generator,
    size: int,
    concentration: float = 0.6,
    floor: float = 1e-6,
    max_tries: int = 1000,
) -> np.ndarray:
    """One symmetric-Dirichlet draw with every coordinate >= floor."""
    if size == 1:
        return np.ones(1)
    for _ in range(max_tries):
        v = rng.dirichlet(np.full(size, concentration))
        if v.min() >= floor:
            return v
    raise RuntimeError("rejection sampling failed; lower the floor")


def sample_cd_economy(
    rng: np.random.Generator,
    n: int,
    m: int,
    concentration: float = 0.6,
    endowment_floor: float = 1e-3,
    alpha_floor: float = 1e-6,
) -> Economy:
    """Random Cobb-Douglas economy satisfying positivity and strong
    competitiveness (endowment columns sum to 1 by construction)."""
    endowments = np.empty((n, m))
    for j in range(m):
        endowments[:, j] = sample_simplex(rng, n, concentration, endowment_floor)
    utilities = tuple(
        UtilityFunction.cobb_douglas(sample_simplex(rng, m, concentration, alpha_floor))
        for _ in range(n)
    )
    return Economy(endowments=endowments, utilities=utilities)
