"""
weighted-oracle.py - Independent weighted isotonic regression oracle

Minimises sum_i w_i (x_i - y_i)^2 subject to x_i <= x_j for every edge (i, j)
directly on the unscaled constraints, by enumerating active edge sets and
solving each equality-constrained problem through its KKT system. Shares no
code with the solvers package.
"""

import itertools

import numpy as np


def weighted_isotonic_oracle(y, w, edges, tol=1e-10):
    """
    Args:
        y: Observations (length m)
        w: Positive weights (length m)
        edges: 0-based (i, j) pairs meaning x_i <= x_j

    Returns:
        Minimiser as a numpy array
    """
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    m = len(y)
    edges = list(edges)
    scale = 1.0 + np.abs(y).max()

    def feasible(x):
        return all(x[i] <= x[j] + tol * scale for i, j in edges)

    if feasible(y):
        return y.copy()

    for size in range(1, min(len(edges), m - 1) + 1):
        for active in itertools.combinations(edges, size):
            C = np.zeros((size, m))
            for row, (i, j) in enumerate(active):
                C[row, i] = 1.0
                C[row, j] = -1.0
            if np.linalg.matrix_rank(C) < size:
                continue

            kkt = np.block([[2.0 * np.diag(w), C.T], [C, np.zeros((size, size))]])
            rhs = np.concatenate([2.0 * w * y, np.zeros(size)])
            solution = np.linalg.solve(kkt, rhs)
            x, multipliers = solution[:m], solution[m:]
            if feasible(x) and np.all(multipliers >= -tol * scale):
                return x

    raise AssertionError("weighted oracle found no KKT point")
