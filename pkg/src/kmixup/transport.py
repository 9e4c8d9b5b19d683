"""Exact optimal transport between two equal-size point clouds.

With uniform weights on k atoms each, the optimal coupling under squared
Euclidean cost is a permutation, so the transport problem reduces to a
linear assignment problem. We solve it with a shortest-augmenting-path
Hungarian method (O(k^3)) compiled with numba.

Tie-breaking rule: rows are inserted in index order and, inside each
Dijkstra sweep, the lowest column index wins among equal reduced
distances. The solver is a pure function of the cost matrix, so equal
matrices always produce the same permutation.
"""
from dataclasses import dataclass

import numba
import numpy as np

from .errors import ParameterError, ShapeError

__all__ = ["Assignment", "cost_matrix", "solve_assignment", "w2_squared", "match"]


@dataclass(frozen=True)
class Assignment:
    """Permutation ``sigma`` with ``sigma[i]`` the column matched to row ``i``."""

    sigma: np.ndarray
    total_cost: float

    @property
    def k(self):
        return len(self.sigma)


def _features(batch):
    x = getattr(batch, "features", batch)
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ShapeError(f"expected a (k, d) point array, got shape {x.shape}")
    return x


def cost_matrix(batch_a, batch_b):
    """Squared Euclidean distances between the points of two k-batches.

    Accepts arrays of shape ``(k, d)`` (1-D arrays are read as ``d = 1``)
    or any object exposing a ``features`` array. Labels never enter.
    """
    a = _features(batch_a)
    b = _features(batch_b)
    if a.shape[0] != b.shape[0]:
        raise ShapeError(f"batch sizes differ: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[1] != b.shape[1]:
        raise ShapeError(f"feature dimensions differ: {a.shape[1]} vs {b.shape[1]}")
    diff = a[:, None, :] - b[None, :, :]
    return np.einsum("ijd,ijd->ij", diff, diff)


@numba.njit(cache=True)
def _shortest_augmenting_path(cost):
    n = cost.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    # owner[j] = 1-based row holding column j; column 0 is the virtual root
    owner = np.zeros(n + 1, dtype=np.int64)
    way = np.zeros(n + 1, dtype=np.int64)
    minv = np.empty(n + 1)
    used = np.empty(n + 1, dtype=np.bool_)
    for i in range(1, n + 1):
        owner[0] = i
        j0 = 0
        minv[:] = np.inf
        used[:] = False
        while True:
            used[j0] = True
            i0 = owner[j0]
            delta = np.inf
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[owner[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if owner[j0] == 0:
                break
        while j0 != 0:
            j1 = way[j0]
            owner[j0] = owner[j1]
            j0 = j1
    sigma = np.empty(n, dtype=np.int64)
    for j in range(1, n + 1):
        sigma[owner[j] - 1] = j - 1
    return sigma


def solve_assignment(cost):
    """Minimum-cost perfect matching for a square, finite, non-negative matrix."""
    c = np.asarray(cost, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ShapeError(f"cost matrix must be square, got shape {c.shape}")
    if c.shape[0] == 0:
        raise ShapeError("cost matrix is empty")
    if not np.all(np.isfinite(c)):
        raise ParameterError("cost matrix has non-finite entries")
    if np.any(c < 0):
        raise ParameterError("cost matrix has negative entries")
    if c.shape[0] == 1:
        sigma = np.zeros(1, dtype=np.int64)
    else:
        sigma = _shortest_augmenting_path(np.ascontiguousarray(c))
    total = float(c[np.arange(len(sigma)), sigma].sum())
    return Assignment(sigma=sigma, total_cost=total)


def match(batch_a, batch_b):
    """Optimal assignment between two k-batches (cost matrix + solve)."""
    return solve_assignment(cost_matrix(batch_a, batch_b))


def w2_squared(batch_a, batch_b):
    """Squared 2-Wasserstein distance between two uniform k-point measures."""
    a = match(batch_a, batch_b)
    return a.total_cost / a.k
