import itertools

import numpy as np
import pytest

from dcbattery.domain import InputError
from dcbattery.lp import BACKEND, LinearProgram, LpError, dump_lp, load_lp, solve_lp
from dcbattery.lp import kernels

KERNELS = ["python"] + (["cython"] if BACKEND == "cython" else [])


def vertex_oracle(lp: LinearProgram):
    """Minimum over all basic solutions of a small bounded LP (brute force)."""
    n = lp.n_vars
    rows = [(a, s, b) for a, s, b in lp.constraints]
    eqs = [(a, b) for a, s, b in rows if s == "=="]
    cand = [(a, b) for a, s, b in rows if s != "=="]
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        if np.isfinite(lp.lower[j]):
            cand.append((e, lp.lower[j]))
        if np.isfinite(lp.upper[j]):
            cand.append((e, lp.upper[j]))
    best = None
    k = n - len(eqs)
    for combo in itertools.combinations(range(len(cand)), k):
        M = np.array([a for a, _ in eqs] + [cand[i][0] for i in combo]).reshape(n, n)
        v = np.array([b for _, b in eqs] + [cand[i][1] for i in combo])
        if abs(np.linalg.det(M)) < 1e-9:
            continue
        x = np.linalg.solve(M, v)
        if lp.max_violation(x) <= 1e-7:
            val = lp.objective(x)
            best = val if best is None else min(best, val)
    return best


def random_lp(rng, n, m):
    A = rng.integers(-4, 5, (m, n)).astype(float)
    senses = list(rng.choice(["<=", ">=", "=="], m, p=[0.6, 0.25, 0.15]))
    x0 = rng.uniform(0, 3, n)  # make the system feasible around x0
    rhs = A @ x0
    rhs += np.where(np.array(senses) == "<=", 1.0, np.where(np.array(senses) == ">=", -1.0, 0.0))
    lower = np.where(rng.random(n) < 0.2, -np.inf, 0.0)
    lower = np.where(lower == 0.0, -rng.integers(0, 2, n).astype(float), lower)
    upper = np.full(n, 5.0)
    c = rng.integers(-5, 6, n).astype(float)
    # variables unbounded below only get costs that push them up, so the LP stays bounded
    c = np.where(np.isinf(lower), -np.abs(c), c)
    return LinearProgram(c, A, senses, rhs, lower, upper, offset=float(rng.normal()))


@pytest.mark.parametrize("seed", range(40))
@pytest.mark.parametrize("rule", ["dantzig", "bland"])
def test_matches_vertex_enumeration(seed, rule):
    rng = np.random.default_rng(seed)
    lp = random_lp(rng, int(rng.integers(2, 4)), int(rng.integers(1, 4)))
    want = vertex_oracle(lp)
    out = solve_lp(lp, rule=rule)
    assert out.optimal
    assert out.objective == pytest.approx(want, rel=1e-8, abs=1e-8)
    assert out.info["max_violation"] <= 1e-8


def test_beale_cycling_example_terminates():
    # classic instance on which textbook Dantzig pricing cycles
    c = [-0.75, 20, -0.5, 6]
    A = [[0.25, -8, -1, 9], [0.5, -12, -0.5, 3], [0, 0, 1, 0]]
    lp = LinearProgram(c, A, ["<="] * 3, [0, 0, 1])
    for rule in ("dantzig", "bland"):
        out = solve_lp(lp, rule=rule)
        assert out.optimal
        assert out.objective == pytest.approx(-1.25)
        np.testing.assert_allclose(out.x, [1, 0, 1, 0], atol=1e-9)


def test_unbounded_and_infeasible():
    unb = LinearProgram([-1.0, 0.0], [[1.0, -1.0]], ["<="], [1.0])
    assert solve_lp(unb).status == "unbounded"
    inf = LinearProgram([1.0], [[1.0], [1.0]], ["<=", ">="], [1.0, 2.0])
    assert solve_lp(inf).status == "infeasible"
    crossed = LinearProgram([1.0], np.zeros((0, 1)), [], [], lower=[2.0], upper=[1.0])
    assert solve_lp(crossed).status == "infeasible"


def test_free_and_upper_only_variables():
    # min x - y with x free, y <= 3, x >= -2 via a row
    lp = LinearProgram([1.0, -1.0], [[1.0, 0.0]], [">="], [-2.0], lower=[-np.inf, -np.inf], upper=[np.inf, 3.0])
    out = solve_lp(lp)
    assert out.objective == pytest.approx(-5.0)


def test_redundant_equalities():
    lp = LinearProgram([1.0, 1.0], [[1, 1], [2, 2]], ["==", "=="], [1.0, 2.0])
    out = solve_lp(lp)
    assert out.optimal and out.objective == pytest.approx(1.0)


def test_scale_invariance():
    rng = np.random.default_rng(5)
    lp = random_lp(rng, 3, 3)
    base = solve_lp(lp).objective
    scaled = LinearProgram(lp.c * 1000, lp.A, lp.senses, lp.rhs, lp.lower, lp.upper, lp.offset * 1000)
    assert solve_lp(scaled).objective == pytest.approx(base * 1000, rel=1e-9)


def test_iteration_limit():
    rng = np.random.default_rng(2)
    lp = random_lp(rng, 3, 3)
    with pytest.raises(LpError):
        solve_lp(lp, max_iter=0)


def test_validation():
    with pytest.raises(InputError):
        LinearProgram([1.0, 2.0], [[1.0]], ["<="], [1.0])
    with pytest.raises(InputError):
        LinearProgram([1.0], [[1.0]], ["<"], [1.0])
    with pytest.raises(InputError):
        LinearProgram([np.nan], [[1.0]], ["<="], [1.0])
    with pytest.raises(ValueError):
        solve_lp(LinearProgram([1.0], [[1.0]], ["<="], [1.0]), rule="steepest")


@pytest.mark.skipif(BACKEND != "cython", reason="compiled kernel not built")
@pytest.mark.parametrize("seed", range(10))
def test_backends_bit_identical(seed):
    rng = np.random.default_rng(100 + seed)
    lp = random_lp(rng, 3, 3)
    a, b = solve_lp(lp, kernel="python"), solve_lp(lp, kernel="cython")
    assert a.status == b.status
    if a.optimal:
        assert a.objective == b.objective
        np.testing.assert_array_equal(a.x, b.x)
        assert a.iterations == b.iterations


def test_kernel_lookup():
    assert kernels.get("python").__name__.endswith("_pykernel")
    with pytest.raises(ValueError):
        kernels.get("fortran")


def test_deterministic_repeat():
    rng = np.random.default_rng(9)
    lp = random_lp(rng, 3, 3)
    a, b = solve_lp(lp), solve_lp(lp)
    np.testing.assert_array_equal(a.x, b.x)


def test_dump_roundtrip(tmp_path):
    rng = np.random.default_rng(11)
    lp = random_lp(rng, 3, 2)
    lp.names = ["a", "b", "c"]
    path = tmp_path / "lp.txt"
    dump_lp(lp, path)
    text = path.read_text().splitlines()
    assert text[0].startswith("# n_vars=3 n_rows=2")
    assert sum(line.startswith("row ") for line in text) == 2
    back = load_lp(path)
    np.testing.assert_array_equal(back.c, lp.c)
    np.testing.assert_array_equal(back.A, lp.A)
    np.testing.assert_array_equal(back.rhs, lp.rhs)
    np.testing.assert_array_equal(back.lower, lp.lower)
    np.testing.assert_array_equal(back.upper, lp.upper)
    assert back.senses == lp.senses and back.offset == lp.offset


def test_scipy_cross_check():
    optimize = pytest.importorskip("scipy.optimize")
    rng = np.random.default_rng(42)
    for _ in range(30):
        n, m = int(rng.integers(3, 8)), int(rng.integers(2, 7))
        lp = random_lp(rng, n, m)
        ub = [i for i, s in enumerate(lp.senses) if s != "=="]
        sign = np.array([1.0 if lp.senses[i] == "<=" else -1.0 for i in ub])
        eq = [i for i, s in enumerate(lp.senses) if s == "=="]
        ref = optimize.linprog(
            lp.c,
            A_ub=lp.A[ub] * sign[:, None] if ub else None,
            b_ub=lp.rhs[ub] * sign if ub else None,
            A_eq=lp.A[eq] if eq else None,
            b_eq=lp.rhs[eq] if eq else None,
            bounds=list(zip(np.where(np.isfinite(lp.lower), lp.lower, None), lp.upper)),
            method="highs",
        )
        out = solve_lp(lp)
        assert out.optimal == (ref.status == 0)
        if out.optimal:
            assert out.objective == pytest.approx(ref.fun + lp.offset, rel=1e-8, abs=1e-8)
