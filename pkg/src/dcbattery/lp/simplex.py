"""Dense two-phase tableau simplex.

The problem is first rewritten in standard form (``x' >= 0``, equality rows
with slacks, nonnegative right-hand sides). Rows that already contain a
positive singleton column start with that column basic; the rest get an
artificial variable and phase 1 drives those to zero.

Pricing is Dantzig's most-negative reduced cost with lowest-index ties, or
Bland's rule throughout with ``rule="bland"``. Under the default rule a run
of degenerate pivots switches to Bland's rule until the objective moves
again, which rules out cycling. Leaving rows tie-break on the lowest basic
variable index, so identical inputs always follow the same pivot sequence.
"""

from __future__ import annotations

import numpy as np

from . import kernels as _default_kernels
from .kernels import get as _get_kernels
from .model import LinearProgram, LpError, LpOutcome

FEAS_TOL = 1e-8
PIVOT_TOL = 1e-10
OPT_TOL = 1e-9
DEGENERATE_RUN = 50


class _StandardForm:
    """``x = shift + S @ xs`` with ``xs >= 0``; rows ``A xs (rel) rhs`` with rhs >= 0."""

    def __init__(self, lp: LinearProgram):
        n = lp.n_vars
        cols: list[tuple[int, float]] = []  # (original var, sign) per standard column
        shift = np.zeros(n)
        ub_rows: list[tuple[int, float]] = []  # (standard column, width)
        self.trivially_infeasible = False
        for j in range(n):
            lo, up = lp.lower[j], lp.upper[j]
            if np.isfinite(lo):
                shift[j] = lo
                cols.append((j, 1.0))
                if np.isfinite(up):
                    if up < lo:
                        self.trivially_infeasible = True
                    ub_rows.append((len(cols) - 1, up - lo))
            elif np.isfinite(up):
                shift[j] = up
                cols.append((j, -1.0))
            else:
                cols.append((j, 1.0))
                cols.append((j, -1.0))
        ns = len(cols)
        S = np.zeros((n, ns))
        for k, (j, sgn) in enumerate(cols):
            S[j, k] = sgn
        A = lp.A @ S
        rhs = lp.rhs - lp.A @ shift
        senses = list(lp.senses)
        if ub_rows:
            U = np.zeros((len(ub_rows), ns))
            for i, (k, _) in enumerate(ub_rows):
                U[i, k] = 1.0
            A = np.vstack([A, U])
            rhs = np.concatenate([rhs, [w for _, w in ub_rows]])
            senses += ["<="] * len(ub_rows)
        flip = rhs < 0
        A[flip] *= -1.0
        rhs = np.where(flip, -rhs, rhs)
        swap = {"<=": ">=", ">=": "<=", "==": "=="}
        senses = [swap[s] if f else s for s, f in zip(senses, flip)]

        self.S = S
        self.shift = shift
        self.A = A
        self.rhs = rhs
        self.senses = senses
        self.c = S.T @ lp.c
        self.n = ns


def _iterate(T, basis, m, obj_row, ncols, rule, kern, max_iter, counters, feas_tol):
    """Run simplex pivots on ``obj_row``; returns "optimal" or "unbounded"."""
    degenerate_run = 0
    while True:
        if counters["iterations"] >= max_iter:
            raise LpError(f"iteration limit {max_iter} reached")
        if rule == "bland" or degenerate_run >= DEGENERATE_RUN:
            c = kern.price_bland(T, obj_row, ncols, OPT_TOL)
        else:
            c = kern.price_dantzig(T, obj_row, ncols, OPT_TOL)
        if c < 0:
            return "optimal"
        r = kern.ratio_test(T, c, m, basis, PIVOT_TOL)
        if r < 0:
            return "unbounded"
        step = T[r, -1] / T[r, c]
        degenerate_run = degenerate_run + 1 if step <= feas_tol else 0
        if degenerate_run == DEGENERATE_RUN:
            counters["bland_switches"] += 1
        kern.pivot(T, r, c)
        basis[r] = c
        rhs = T[:m, -1]
        rhs[(rhs < 0) & (rhs > -feas_tol)] = 0.0
        counters["iterations"] += 1


def solve_lp(
    lp: LinearProgram,
    rule: str = "dantzig",
    max_iter: int | None = None,
    kernel: str | None = None,
    feas_tol: float = FEAS_TOL,
) -> LpOutcome:
    """Solve ``lp`` to optimality, or report it infeasible or unbounded.

    ``kernel`` selects ``"python"`` or ``"cython"`` explicitly; by default the
    backend chosen at import is used.
    """
    if rule not in ("dantzig", "bland"):
        raise ValueError(f"unknown pivot rule {rule!r}")
    kern = _default_kernels if kernel is None else _get_kernels(kernel)
    sf = _StandardForm(lp)
    if sf.trivially_infeasible:
        return LpOutcome("infeasible")

    m, ns = sf.A.shape
    n_slack = sum(1 for s in sf.senses if s != "==")
    # crash basis: positive singleton structural columns for >= and == rows
    nnz = np.count_nonzero(sf.A, axis=0)
    basic_col = np.full(m, -1, dtype=np.int64)
    used = np.zeros(ns, dtype=bool)
    for i, s in enumerate(sf.senses):
        if s == "<=":
            continue
        for j in np.flatnonzero((nnz == 1) & (sf.A[i] > 0) & ~used):
            basic_col[i] = j
            used[j] = True
            break
    need_art = [i for i, s in enumerate(sf.senses) if s != "<=" and basic_col[i] < 0]
    n_art = len(need_art)
    art_start = ns + n_slack
    width = art_start + n_art

    T = np.zeros((m + 2, width + 1))
    T[:m, :ns] = sf.A
    T[:m, -1] = sf.rhs
    basis = np.empty(m, dtype=np.int64)
    k = ns
    for i, s in enumerate(sf.senses):
        if s == "<=":
            T[i, k] = 1.0
            basis[i] = k
            k += 1
        elif s == ">=":
            T[i, k] = -1.0
            k += 1
    for a, i in enumerate(need_art):
        T[i, art_start + a] = 1.0
        basis[i] = art_start + a
    for i in range(m):
        j = basic_col[i]
        if j >= 0:
            T[i] /= T[i, j]
            basis[i] = j

    # phase-2 objective row (m) and phase-1 objective row (m + 1), priced out
    T[m, :ns] = sf.c
    cb = np.zeros(m)
    in_struct = basis < ns
    cb[in_struct] = sf.c[basis[in_struct]]
    T[m] -= cb @ T[:m]
    if n_art:
        T[m + 1, art_start:width] = 1.0
        T[m + 1] -= T[need_art].sum(axis=0)

    counters = {"iterations": 0, "bland_switches": 0}
    if max_iter is None:
        max_iter = 50 * (m + width) + 1000

    if n_art:
        status = _iterate(T, basis, m, m + 1, art_start, rule, kern, max_iter, counters, feas_tol)
        infeas = -T[m + 1, -1]
        if status != "optimal" or infeas > feas_tol * max(1.0, float(sf.rhs.max(initial=0.0))):
            return LpOutcome("infeasible", iterations=counters["iterations"], info=dict(counters))
        redundant = []
        for i in range(m):
            if basis[i] < art_start:
                continue
            row = np.abs(T[i, :art_start])
            j = int(np.argmax(row)) if art_start else 0
            if art_start and row[j] > PIVOT_TOL:
                kern.pivot(T, i, j)
                basis[i] = j
            else:
                redundant.append(i)
        keep = np.setdiff1d(np.arange(m), redundant)
        T = np.ascontiguousarray(
            np.delete(np.delete(T, np.arange(art_start, width), axis=1), redundant + [m + 1], axis=0)
        )
        basis = np.ascontiguousarray(basis[keep])
        m = keep.size
    else:
        keep = np.arange(m)
        T = np.ascontiguousarray(T[: m + 1, np.r_[0:art_start, width]])

    status = _iterate(T, basis, m, m, art_start, rule, kern, max_iter, counters, feas_tol)
    if status == "unbounded":
        return LpOutcome("unbounded", iterations=counters["iterations"], info=dict(counters))

    xs_full = np.zeros(art_start)
    xs_full[basis] = T[:m, -1]
    xs_full = _polish(sf, keep, basis, xs_full, feas_tol)
    x = sf.shift + sf.S @ xs_full[:ns]
    info = dict(counters)
    info["max_violation"] = lp.max_violation(x)
    return LpOutcome("optimal", x=x, objective=lp.objective(x), iterations=counters["iterations"], info=info)


def _polish(sf: _StandardForm, keep, basis, xs_full, feas_tol):
    """Recompute basic values from the original rows to shed accumulated round-off."""
    m = keep.size
    cols = np.zeros((sf.A.shape[0], sf.A.shape[1] + sum(1 for s in sf.senses if s != "==")))
    cols[:, : sf.n] = sf.A
    k = sf.n
    for i, s in enumerate(sf.senses):
        if s == "<=":
            cols[i, k] = 1.0
            k += 1
        elif s == ">=":
            cols[i, k] = -1.0
            k += 1
    B = cols[keep][:, basis]
    try:
        xb = np.linalg.solve(B, sf.rhs[keep])
    except np.linalg.LinAlgError:
        return xs_full
    if not np.all(np.isfinite(xb)) or np.any(xb < -feas_tol) or m == 0:
        return xs_full
    out = np.zeros_like(xs_full)
    out[basis] = np.maximum(xb, 0.0)
    return out
