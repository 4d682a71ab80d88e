"""Time the compiled and numpy simplex kernels on the hourly joint LP.

    python3 benchmarks/bench_simplex.py --repeats 5
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from dcbattery.config import parse_config
from dcbattery.lp import solve_lp
from dcbattery.lp import kernels
from dcbattery.optimizers import SolveOptions, optimize_joint
from dcbattery.synth import PeakCategory, RegulationModel, synth_regulation, synth_trace, trial_rng
import dcbattery.optimizers as optimizers


def joint_lp(category: str, seed: int):
    """Capture the LP the joint optimizer builds, without solving it twice."""
    cfg = parse_config("battery.p_mw = 1\nbattery.e_mwh = 0.5\nbaseline_mode = raw\n")
    trace = synth_trace(PeakCategory.parse(category))
    r = synth_regulation(RegulationModel(), len(trace), trace.t_s, rng=trial_rng(seed, 0))
    captured = []
    real = optimizers._solve

    def grab(lp, opts, what):
        captured.append(lp)
        return real(lp, opts, what)

    optimizers._solve = grab
    try:
        optimize_joint(trace, r, cfg.battery(trace), cfg.tariff(trace.t_s), SolveOptions(baseline_mode="raw"))
    finally:
        optimizers._solve = real
    return captured[-1]


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--instances", type=int, default=4)
    args = ap.parse_args()

    lps = [joint_lp(c, i) for i, c in enumerate(["rect.wide.low", "tri.narrow.high", "rect.narrow.high", "tri.wide.low"][: args.instances])]
    print(f"joint LP: {lps[0].n_vars} variables, {lps[0].n_rows} rows; compiled kernel available: {kernels.BACKEND == 'cython'}")
    backends = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])
    results = {}
    for name in backends:
        times, objs = [], []
        for lp in lps:
            best = np.inf
            for _ in range(args.repeats):
                t0 = time.perf_counter()
                out = solve_lp(lp, kernel=name)
                best = min(best, time.perf_counter() - t0)
            times.append(best)
            objs.append(out.objective)
        results[name] = (times, objs)
        print(f"{name:7s} median {np.median(times) * 1e3:8.1f} ms   max {max(times) * 1e3:8.1f} ms")
    if len(results) == 2:
        py, cy = results["python"], results["cython"]
        print(f"speedup {np.median(py[0]) / np.median(cy[0]):.2f}x; objectives identical: {py[1] == cy[1]}")


if __name__ == "__main__":
    main()
