"""Linear-program container, solver outcome, and a plain-text dump format."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..domain import InputError

RELATIONS = ("<=", "==", ">=")


class LpError(RuntimeError):
    """The solver could not produce a usable answer (iteration limit, numerics)."""


@dataclass
class LinearProgram:
    """``min c @ x + offset`` subject to ``A[i] @ x  rel[i]  rhs[i]`` and box bounds.

    Bounds may be infinite. ``names`` is only used by :func:`dump_lp`.
    """

    c: np.ndarray
    A: np.ndarray
    senses: list[str]
    rhs: np.ndarray
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    offset: float = 0.0
    names: list[str] | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        n = self.c.size
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = np.zeros((0, n))
        elif A.ndim == 1:
            A = A.reshape(1, -1)
        self.A = A
        self.rhs = np.asarray(self.rhs, dtype=float).reshape(-1)
        self.senses = list(self.senses)
        self.lower = np.zeros(n) if self.lower is None else np.asarray(self.lower, dtype=float).reshape(-1)
        self.upper = np.full(n, np.inf) if self.upper is None else np.asarray(self.upper, dtype=float).reshape(-1)
        m = self.A.shape[0]
        if self.A.ndim != 2 or self.A.shape[1] != n or self.rhs.size != m or len(self.senses) != m:
            raise InputError(
                f"dimension mismatch: c has {n} entries, A is {self.A.shape}, "
                f"rhs has {self.rhs.size}, {len(self.senses)} relations"
            )
        if self.lower.size != n or self.upper.size != n:
            raise InputError("bounds must have one entry per variable")
        for name in ("c", "A", "rhs"):
            if np.isnan(getattr(self, name)).any() or np.isinf(getattr(self, name)).any():
                raise InputError(f"{name} contains NaN or inf")
        if np.isnan(self.lower).any() or np.isnan(self.upper).any():
            raise InputError("bounds contain NaN")
        if np.any(self.lower == np.inf) or np.any(self.upper == -np.inf):
            raise InputError("lower bound +inf or upper bound -inf")
        bad = [s for s in self.senses if s not in RELATIONS]
        if bad:
            raise InputError(f"unknown relation {bad[0]!r}; use one of {RELATIONS}")
        if self.names is not None and len(self.names) != n:
            raise InputError("names must have one entry per variable")

    @property
    def n_vars(self) -> int:
        return self.c.size

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    @property
    def constraints(self) -> list[tuple[np.ndarray, str, float]]:
        return [(self.A[i], self.senses[i], float(self.rhs[i])) for i in range(self.n_rows)]

    def objective(self, x) -> float:
        return float(self.c @ x + self.offset)

    def max_violation(self, x) -> float:
        """Largest absolute violation of any row or bound at ``x``."""
        x = np.asarray(x, dtype=float)
        worst = 0.0
        if self.n_rows:
            lhs = self.A @ x
            diff = lhs - self.rhs
            for i, s in enumerate(self.senses):
                if s == "<=":
                    v = diff[i]
                elif s == ">=":
                    v = -diff[i]
                else:
                    v = abs(diff[i])
                worst = max(worst, v)
        worst = max(worst, float(np.max(self.lower - x, initial=0.0)), float(np.max(x - self.upper, initial=0.0)))
        return worst


@dataclass
class LpOutcome:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None = None
    objective: float | None = None
    iterations: int = 0
    info: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _fmt(v: float) -> str:
    if v == np.inf:
        return "inf"
    if v == -np.inf:
        return "-inf"
    return repr(float(v))


def dump_lp(lp: LinearProgram, path) -> None:
    """Write ``lp`` as text: one objective line, one bound line per variable,
    one line per constraint with sparse ``index:coef`` terms."""
    names = lp.names or [f"x{j}" for j in range(lp.n_vars)]
    lines = [f"# n_vars={lp.n_vars} n_rows={lp.n_rows}", f"offset {_fmt(lp.offset)}"]
    lines.append("min " + " ".join(f"{j}:{_fmt(v)}" for j, v in enumerate(lp.c) if v != 0))
    for j in range(lp.n_vars):
        lines.append(f"bound {j} {names[j]} {_fmt(lp.lower[j])} {_fmt(lp.upper[j])}")
    for i in range(lp.n_rows):
        row = lp.A[i]
        terms = " ".join(f"{j}:{_fmt(row[j])}" for j in np.flatnonzero(row))
        lines.append(f"row {i} {lp.senses[i]} {_fmt(lp.rhs[i])} {terms}")
    Path(path).write_text("\n".join(lines) + "\n")


def _parse(v: str) -> float:
    return float(v)  # float() already accepts "inf" and "-inf"


def load_lp(path) -> LinearProgram:
    """Inverse of :func:`dump_lp`."""
    n = m = 0
    offset = 0.0
    c_terms: list[str] = []
    bounds: dict[int, tuple[str, float, float]] = {}
    rows: list[tuple[str, float, list[str]]] = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        head, *rest = line.split()
        if head == "#":
            kv = dict(tok.split("=") for tok in rest)
            n, m = int(kv["n_vars"]), int(kv["n_rows"])
        elif head == "offset":
            offset = _parse(rest[0])
        elif head == "min":
            c_terms = rest
        elif head == "bound":
            bounds[int(rest[0])] = (rest[1], _parse(rest[2]), _parse(rest[3]))
        elif head == "row":
            rows.append((rest[1], _parse(rest[2]), rest[3:]))
        else:
            raise InputError(f"unrecognized LP dump line: {line!r}")

    def dense(terms: list[str]) -> np.ndarray:
        out = np.zeros(n)
        for t in terms:
            j, v = t.split(":", 1)
            out[int(j)] = _parse(v)
        return out

    A = np.array([dense(t) for _, _, t in rows]).reshape(m, n)
    return LinearProgram(
        c=dense(c_terms),
        A=A,
        senses=[s for s, _, _ in rows],
        rhs=np.array([r for _, r, _ in rows]),
        lower=np.array([bounds[j][1] for j in range(n)]),
        upper=np.array([bounds[j][2] for j in range(n)]),
        offset=offset,
        names=[bounds[j][0] for j in range(n)],
    )
