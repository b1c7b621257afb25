"""Geometry helpers for vectors on the probability simplex.

Prices and Cobb-Douglas exponent vectors both live on the unit simplex
{v >= 0, sum v = 1}; the solvers and the misreport optimizer share these
routines.
"""
from __future__ import annotations

import itertools

import numpy as np


def simplex_grid(m: int, points_per_dim: int) -> np.ndarray:
    """Lattice of simplex points with coordinates k/(points_per_dim-1).

    Returns an array of shape (count, m) in lexicographic order, where
    count = C(points_per_dim - 1 + m - 1, m - 1).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if points_per_dim < 2:
        raise ValueError("points_per_dim must be >= 2")
    steps = points_per_dim - 1
    if m == 1:
        return np.ones((1, 1))
    rows = []
    for cuts in itertools.combinations(range(steps + m - 1), m - 1):
        parts = np.diff((-1,) + cuts + (steps + m - 1,)) - 1
        rows.append(parts)
    return np.asarray(rows, dtype=float) / steps


def interior_simplex_grid(m: int, points_per_dim: int) -> np.ndarray:
    """Simplex lattice restricted to strictly positive coordinates."""
    grid = simplex_grid(m, points_per_dim)
    return grid[(grid > 0).all(axis=1)]


def clip_renormalize(v: np.ndarray, floor: float = 0.0) -> np.ndarray:
    """Clamp coordinates below `floor` up to `floor`, then rescale to sum 1."""
    w = np.maximum(np.asarray(v, dtype=float), floor)
    total = w.sum()
    if total <= 0:
        raise ValueError("cannot renormalize a nonpositive vector")
    return w / total


def euclidean_project(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the unit simplex (sort-based algorithm)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    rho = np.nonzero(u + (1.0 - css) / np.arange(1, v.size + 1) > 0)[0][-1]
    theta = (css[rho] - 1.0) / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def transfer_directions(m: int) -> np.ndarray:
    """All ordered pairwise mass-transfer directions e_j - e_k, j != k.

    These positively span the tangent space of the simplex (empty for
    m == 1, where the simplex is a single point).
    """
    dirs = np.zeros((m * (m - 1), m))
    row = 0
    for j in range(m):
        for k in range(m):
            if j != k:
                dirs[row, j] = 1.0
                dirs[row, k] = -1.0
                row += 1
    return dirs
