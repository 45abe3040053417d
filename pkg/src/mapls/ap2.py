"""Exact solver for the two-dimensional assignment problem.

Thin, validated wrapper around scipy's shortest-augmenting-path solver
(Jonker-Volgenant with potentials, O(n^3)), which is the subroutine behind
every dimensionwise heuristic and ROM. Deterministic: equal matrices yield
equal permutations, and the all-zeros matrix yields the identity.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment


def solve_ap2(matrix: np.ndarray) -> tuple[np.ndarray, float]:
    """Minimize sum(M[i, perm[i]]) over permutations.

    Returns (perm, cost) with perm an int64 array mapping rows to columns.
    Raises ValueError for non-square or non-finite input.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"need a square matrix with n >= 1, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix entries must be finite")
    rows, cols = linear_sum_assignment(m)
    perm = cols.astype(np.int64)
    return perm, float(m[rows, cols].sum())
