"""Numpy implementations of the tableau kernels.

Same signatures and results as the compiled ``_ckernel`` module; used when the
extension is not built.
"""

import numpy as np

FLUSH = 1e-13


def pivot(T: np.ndarray, r: int, c: int) -> None:
    """Gauss-Jordan pivot of tableau ``T`` (in place) on entry ``(r, c)``."""
    prow = T[r] / T[r, c]
    prow[np.abs(prow) < FLUSH] = 0.0
    prow[c] = 1.0
    T[r] = prow
    col = T[:, c].copy()
    col[r] = 0.0
    rows = np.flatnonzero(col)
    if rows.size == 0:
        return
    ix = np.ix_(rows, np.flatnonzero(prow))
    block = T[ix] - np.outer(col[rows], prow[ix[1][0]])
    block[np.abs(block) < FLUSH] = 0.0
    T[ix] = block
    T[rows, c] = 0.0


def price_dantzig(T: np.ndarray, obj_row: int, ncols: int, tol: float) -> int:
    """Column with the most negative reduced cost (lowest index on ties), or -1."""
    d = T[obj_row, :ncols]
    j = int(np.argmin(d))
    return j if d[j] < -tol else -1


def price_bland(T: np.ndarray, obj_row: int, ncols: int, tol: float) -> int:
    """Lowest-index column with negative reduced cost, or -1."""
    hits = np.flatnonzero(T[obj_row, :ncols] < -tol)
    return int(hits[0]) if hits.size else -1


def ratio_test(T: np.ndarray, c: int, m: int, basis: np.ndarray, pivtol: float) -> int:
    """Minimum-ratio leaving row for entering column ``c``, or -1 if unbounded.

    Ties are broken by the lowest basic-variable index.
    """
    col = T[:m, c]
    cand = np.flatnonzero(col > pivtol)
    if cand.size == 0:
        return -1
    ratios = T[cand, -1] / col[cand]
    best = ratios.min()
    tied = cand[ratios <= best + 1e-12 * (1.0 + abs(best))]
    if tied.size == 1:
        return int(tied[0])
    return int(tied[np.argmin(basis[tied])])
