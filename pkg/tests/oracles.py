"""Independent reference computations used to cross-check the implementation.

Everything here is deliberately written from the mathematical definition,
not by calling back into the package, so tests compare two formulations.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


def frame_dist(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sqrt(np.sum((a - b) ** 2)))


def dtw_cost_enumerated(a: np.ndarray, b: np.ndarray) -> float:
    """Minimum path cost by exhaustive search over every monotone path.

    Depth-first enumeration of the {(1,1), (1,0), (0,1)} step tree; partial
    paths whose accumulated cost already meets the best-known total are cut,
    which cannot change the minimum because step costs are nonnegative.
    Exponential in the input size; only usable for short sequences.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    n, m = a.shape[0], b.shape[0]
    costmat = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=-1)).tolist()
    best = [float("inf")]

    def walk(i: int, j: int, acc: float) -> None:
        acc += costmat[i][j]
        if acc >= best[0]:
            return
        if i == n - 1 and j == m - 1:
            best[0] = acc
            return
        if i + 1 < n and j + 1 < m:
            walk(i + 1, j + 1, acc)
        if i + 1 < n:
            walk(i + 1, j, acc)
        if j + 1 < m:
            walk(i, j + 1, acc)

    walk(0, 0, 0.0)
    return best[0]


def dtw_cost_recursive(a: np.ndarray, b: np.ndarray) -> float:
    """Minimum path cost from the top-down recurrence with memoization."""
    A = np.asarray(a, dtype=float)
    B = np.asarray(b, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if B.ndim == 1:
        B = B[:, None]

    @lru_cache(maxsize=None)
    def cost(i: int, j: int) -> float:
        d = frame_dist(A[i], B[j])
        if i == 0 and j == 0:
            return d
        if i == 0:
            return d + cost(0, j - 1)
        if j == 0:
            return d + cost(i - 1, 0)
        return d + min(cost(i - 1, j - 1), cost(i - 1, j), cost(i, j - 1))

    return cost(A.shape[0] - 1, B.shape[0] - 1)


def pearson_reference(x, y) -> float:
    """Pearson correlation straight from the covariance definition."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    mx, my = x.sum() / n, y.sum() / n
    cov = float(np.sum((x - mx) * (y - my))) / n
    sx = float(np.sqrt(np.sum((x - mx) ** 2) / n))
    sy = float(np.sqrt(np.sum((y - my) ** 2) / n))
    return cov / (sx * sy)
