"""Command-line entry point.

Exit codes: 0 on success, 1 for bad input (files, config, arguments),
2 when an LP ends infeasible, unbounded or hits its iteration limit.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import __version__
from .billing import baseline_bill, bill_breakdown
from .config import load_config
from .domain import DispatchSolution, InputError, RegulationSeries, TraceSeries
from .gain import category_trials, sweep
from .ingest import (
    load_regulation_csv,
    load_trace_csv,
    report_document,
    resample,
    window_hours,
    write_json,
    write_regulation_csv,
    write_trace_csv,
)
from .lp import LpError
from .optimizers import (
    SolverError,
    optimize_joint,
    optimize_peak_shaving,
    optimize_regulation,
    regulation_total_bill,
)
from .peaks import peak_statistics
from .synth import PeakCategory, RegulationModel, synth_regulation, synth_trace

log = logging.getLogger("dcbattery")

HOUR_S = 3600.0
CATEGORIES = [
    f"{shape}.{width}.{height}"
    for shape in ("rect", "tri")
    for width in ("narrow", "wide")
    for height in ("low", "high")
]
CONSECUTIVE = "tri.narrow.low"


def _normalized(trace: TraceSeries) -> TraceSeries:
    peak = float(trace.samples.max())
    if peak <= 0:
        raise InputError("cannot normalize an all-zero trace")
    return TraceSeries(trace.samples / peak, trace.t_s, trace.start_time)


def _load_trace(args) -> TraceSeries:
    trace = load_trace_csv(args.trace)
    return _normalized(trace) if getattr(args, "normalize", False) else trace


def _load_reg(path, t_s: float) -> RegulationSeries:
    reg = load_regulation_csv(path)
    if not np.isclose(reg.t_s, t_s):
        reg = resample(reg, t_s)
    return reg


def _windows(trace: TraceSeries) -> list[TraceSeries]:
    if len(trace) * trace.t_s < HOUR_S:
        return [trace]
    return window_hours(trace)


def cmd_bill(args) -> int:
    cfg = load_config(args.config)
    trace = _load_trace(args)
    tariff = cfg.tariff(trace.t_s)
    total = 0.0
    for k, w in enumerate(_windows(trace)):
        j = baseline_bill(w, tariff)
        total += j
        print(f"hour {k:4d}  {j:12.2f}")
    print(f"total      {total:12.2f}")
    return 0


def _dispatch_dict(d: DispatchSolution) -> dict:
    return {"C": d.C, "b": d.b.tolist(), "y": d.y.tolist(), "soc": d.soc.tolist()}


def cmd_optimize(args) -> int:
    cfg = load_config(args.config)
    trace = _load_trace(args)
    windows = _windows(trace)
    if not 0 <= args.window < len(windows):
        raise InputError(f"window {args.window} out of range (trace has {len(windows)})")
    w = windows[args.window]
    battery = cfg.battery(w)
    tariff = cfg.tariff(trace.t_s)
    opts = cfg.solve_options(dump_lp=args.dump_lp)
    doc = {"config_echo": cfg.echo(battery), "mode": args.mode, "window": args.window}
    if args.mode == "peak":
        dispatch, bill = optimize_peak_shaving(w, battery, tariff, opts)
        doc.update(J=baseline_bill(w, tariff), J_p=bill.total, bill=bill.as_dict())
        line = f"J = {doc['J']:.2f}  J_p = {bill.total:.2f}"
    else:
        if args.reg is None:
            raise InputError(f"--reg is required for mode {args.mode}")
        reg = _load_reg(args.reg, trace.t_s)
        start = int(round((w.start_time - trace.start_time) / trace.t_s))
        r = RegulationSeries(reg.samples[start : start + len(w)], trace.t_s)
        if len(r) != len(w):
            raise InputError(f"regulation signal is shorter than window {args.window}")
        if args.mode == "regulation":
            dispatch, revenue = optimize_regulation(r, battery, tariff, opts, trace=w)
            J_r = regulation_total_bill(w, dispatch, tariff, revenue)
            bill = bill_breakdown(w, dispatch, r.samples, tariff)
            doc.update(revenue=revenue, J_r=J_r, bill=bill.as_dict())
            line = f"R* = {revenue:.2f}  J_r = {J_r:.2f}"
        else:
            dispatch, bill = optimize_joint(w, r, battery, tariff, opts)
            doc.update(J=baseline_bill(w, tariff), J_star=bill.total, bill=bill.as_dict())
            line = f"J = {doc['J']:.2f}  J* = {bill.total:.2f}  C = {dispatch.C:.3f}"
    doc["dispatch"] = _dispatch_dict(dispatch)
    if args.out:
        write_json(doc, args.out)
    print(line)
    return 0


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    trace = _load_trace(args)
    reg = _load_reg(args.reg, trace.t_s)
    battery = cfg.battery(trace)
    workers = args.workers if args.workers is not None else cfg.workers
    summary = sweep(trace, reg, battery, cfg.tariff(trace.t_s), cfg.solve_options(), workers=workers)
    write_json(report_document(summary.windows, summary, cfg.echo(battery)), args.out)
    print(
        f"hours {summary.hours_total}  superlinear {summary.hours_superlinear}  "
        f"probability {summary.probability:.2f}  mean q {summary.mean_q:.4f}"
    )
    return 0


def cmd_analyze_peaks(args) -> int:
    cfg = load_config(args.config)
    trace = _load_trace(args)
    stats = peak_statistics(trace, f=cfg.f, gap_threshold_s=cfg.nocp_gap_s)
    doc = {"config_echo": {"f": cfg.f, "nocp_gap_s": cfg.nocp_gap_s}, **stats.as_dict()}
    write_json(doc, args.out)
    print(f"peaks {stats.n_peaks}  days {len(stats.day_shapes)}")
    return 0


def _hour_steps(t_s: float) -> int:
    steps = HOUR_S / t_s
    if abs(steps - round(steps)) > 1e-9:
        raise InputError(f"step {t_s} s does not divide an hour")
    return int(round(steps))


def cmd_synth_trace(args) -> int:
    cat = PeakCategory.parse(args.category, args.count, args.gap)
    hour = synth_trace(cat, _hour_steps(args.t_s), args.t_s)
    write_trace_csv(TraceSeries(np.tile(hour.samples, args.hours), args.t_s), args.out)
    return 0


def cmd_synth_reg(args) -> int:
    model = RegulationModel(step_sigma=args.sigma, seed=args.seed)
    write_regulation_csv(synth_regulation(model, _hour_steps(args.t_s) * args.hours, args.t_s), args.out)
    return 0


def _category_row(cat, args, cfg, seed, workers) -> dict:
    trace = synth_trace(cat)
    battery = cfg.battery(trace)
    reports = category_trials(
        cat, args.trials, cfg.reg_model(), battery, cfg.tariff(trace.t_s), seed, cfg.solve_options(), workers=workers
    )
    hits = sum(r.superlinear for r in reports)
    return {
        "category": cat.label,
        "trials": len(reports),
        "superlinear": hits,
        "probability": hits / len(reports),
        "mean_q": float(np.mean([r.q for r in reports])),
    }


def cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    seed = args.seed if args.seed is not None else cfg.seed
    workers = args.workers if args.workers is not None else cfg.workers
    rows = [_category_row(PeakCategory.parse(c), args, cfg, seed, workers) for c in CATEGORIES]
    consecutive = []
    for n in (1, 2, 3):
        row = _category_row(PeakCategory.parse(CONSECUTIVE, n, cfg.nocp_gap_s), args, cfg, seed, workers)
        row["category"] = f"{PeakCategory.parse(CONSECUTIVE).label}x{n}"
        consecutive.append(row)
    prob = {row["category"]: row["probability"] for row in rows}
    cons = [row["probability"] for row in consecutive]
    trends = {
        "rect_wide_low_gt_narrow_high": prob["rectangular.wide.low"] > prob["rectangular.narrow.high"],
        "tri_wide_low_gt_narrow_high": prob["triangular.wide.low"] > prob["triangular.narrow.high"],
        "consecutive_nondecreasing": cons[0] <= cons[1] <= cons[2],
    }
    echo = cfg.echo()
    echo.update(trials=args.trials, seed=seed)
    write_json({"config_echo": echo, "categories": rows, "consecutive": consecutive, "trends": trends}, args.out)
    for row in rows + consecutive:
        print(f"{row['category']:28s} {row['probability']:.2f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dcbattery", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def with_trace(sp, config=True):
        sp.add_argument("--trace", required=True)
        if config:
            sp.add_argument("--config")
        sp.add_argument("--normalize", action="store_true", help="divide the load by its peak")

    sp = sub.add_parser("bill", help="baseline bill per hour")
    with_trace(sp)
    sp.set_defaults(func=cmd_bill)

    sp = sub.add_parser("optimize", help="solve one window")
    with_trace(sp)
    sp.add_argument("--mode", choices=("peak", "regulation", "joint"), required=True)
    sp.add_argument("--reg")
    sp.add_argument("--out")
    sp.add_argument("--window", type=int, default=0, help="hour index within the trace")
    sp.add_argument("--dump-lp", metavar="PATH")
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("sweep", help="four scenarios on every hour")
    with_trace(sp)
    sp.add_argument("--reg", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--workers", type=int)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("analyze-peaks", help="peak statistics of a trace")
    with_trace(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_analyze_peaks)

    synth = sub.add_parser("synth", help="write synthetic inputs").add_subparsers(dest="what", required=True)
    sp = synth.add_parser("trace")
    sp.add_argument("--category", required=True, help="e.g. rect.narrow.low or tri.wide.high")
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--gap", type=float, default=120.0, help="valley between peaks, seconds")
    sp.add_argument("--hours", type=int, default=1)
    sp.add_argument("--t-s", type=float, default=20.0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_synth_trace)
    sp = synth.add_parser("reg")
    sp.add_argument("--sigma", type=float, default=0.3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--hours", type=int, default=1)
    sp.add_argument("--t-s", type=float, default=2.0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_synth_reg)

    exp = sub.add_parser("experiment", help="synthetic experiments").add_subparsers(dest="what", required=True)
    sp = exp.add_parser("categories")
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--config")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SolverError, LpError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
