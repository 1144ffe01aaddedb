"""Dynamic time warping over multichannel frame sequences.

Classic dynamic-programming alignment with the symmetric step set
{(1,0), (0,1), (1,1)} and Euclidean frame cost. The cost is the plain sum of
frame distances along the optimal path (no path-length normalization), which
keeps the value symmetric and directly comparable across equal inputs.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist


def dtw_distance(a, b) -> tuple[float, list[tuple[int, int]]]:
    """Align two frame sequences; returns (cost, monotone index path).

    ``a`` and ``b`` are (n, d) arrays (1-d input is treated as a single
    channel). The path starts at (0, 0), ends at (len(a)-1, len(b)-1), and
    ties are broken in favor of the diagonal step so identical inputs yield
    the diagonal path with cost 0.
    """
    A = np.asarray(a, dtype=float)
    B = np.asarray(b, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if B.ndim == 1:
        B = B[:, None]
    if A.shape[0] == 0 or B.shape[0] == 0:
        raise ValueError("dtw_distance requires non-empty sequences")
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"channel mismatch: {A.shape[1]} vs {B.shape[1]}")

    cost = cdist(A, B)
    n, m = cost.shape
    acc = np.empty((n, m))
    acc[0, 0] = cost[0, 0]
    for j in range(1, m):
        acc[0, j] = acc[0, j - 1] + cost[0, j]
    for i in range(1, n):
        acc[i, 0] = acc[i - 1, 0] + cost[i, 0]
        row = acc[i]
        prev = acc[i - 1]
        for j in range(1, m):
            row[j] = cost[i, j] + min(prev[j - 1], prev[j], row[j - 1])

    path = [(n - 1, m - 1)]
    i, j = n - 1, m - 1
    while i > 0 or j > 0:
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            diag, up, left = acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1]
            if diag <= up and diag <= left:
                i -= 1
                j -= 1
            elif up <= left:
                i -= 1
            else:
                j -= 1
        path.append((i, j))
    path.reverse()
    return float(acc[n - 1, m - 1]), path
