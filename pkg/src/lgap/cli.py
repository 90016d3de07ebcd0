"""Command-line entry point.

Exit codes: 0 success, 1 input or configuration error, 2 excitation failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import config as cfgmod
from .behavior import (ARModel, Complexity, ExcitationError, TrajectoryFormatError,
                       ar_graph_form, behavior_basis, format_float, hankel,
                       read_trajectory_csv)
from .metrics import all_metrics, gap, graph_gap_bounds
from .recognition import mismatch_onsets, run_closed_loop, write_summary
from .sarx import generate_excited_trajectory
from .subspace import singular_values

EXIT_OK, EXIT_INPUT, EXIT_EXCITATION = 0, 1, 2


def _fmt(x: float) -> str:
    return format_float(float(x))


def _complexity(args, m: int) -> Complexity:
    return Complexity(args.m if args.m is not None else m, args.lag, args.n)


def _bases(args):
    w1 = read_trajectory_csv(args.file1)
    w2 = read_trajectory_csv(args.file2)
    if (w1.m, w1.p) != (w2.m, w2.p):
        raise TrajectoryFormatError(
            f"input/output partitions differ: ({w1.m},{w1.p}) vs ({w2.m},{w2.p})")
    c = _complexity(args, w1.m)
    return behavior_basis(w1, args.L, c), behavior_basis(w2, args.L, c)


def cmd_gap(args) -> int:
    V, W = _bases(args)
    res = gap(V, W)
    print(f"value,{_fmt(res.value)}")
    print(f"theta_max,{_fmt(res.theta_max)}")
    print(f"via_projectors,{_fmt(res.via_projectors)}")
    print(f"via_complement,{_fmt(res.via_complement)}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    V, W = _bases(args)
    print("metric,value")
    for name, val in all_metrics(V, W).items():
        print(f"{name},{_fmt(val)}")
    return EXIT_OK


def cmd_singular_values(args) -> int:
    w = read_trajectory_csv(args.file)
    s = singular_values(hankel(w, args.L))
    s_full = np.zeros(w.q * args.L)
    s_full[:s.size] = s
    print("index,sigma")
    for i, v in enumerate(s_full, start=1):
        print(f"{i},{_fmt(v)}")
    return EXIT_OK


def cmd_ar_bounds(args) -> int:
    L = len(args.b)
    L_t = len(args.b_tilde)
    if args.L is not None and args.L not in (L, L_t):
        raise ValueError(f"--L {args.L} disagrees with {L} b-coefficients")
    if L != L_t:
        raise ValueError(f"window lengths differ: {L} vs {L_t}")
    F = ar_graph_form(ARModel(L, tuple(args.a), tuple(args.b)))
    Ft = ar_graph_form(ARModel(L, tuple(args.a_tilde), tuple(args.b_tilde)))
    rep = graph_gap_bounds(F, Ft)
    print(f"lower,{_fmt(rep.lower)}")
    print(f"gap,{_fmt(rep.gap)}")
    print(f"upper,{_fmt(rep.upper)}")
    print(f"F_delta_norm,{_fmt(rep.F_delta_norm)}")
    print(f"bounds_hold,{'pass' if rep.holds() else 'fail'}")
    return EXIT_OK


def _write_rows(path, header, rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(r if isinstance(r, str) else
                              (str(r) if isinstance(r, (int, np.integer)) else _fmt(r))
                              for r in row) + "\n")


def cmd_run(args) -> int:
    doc = {}
    if args.config:
        doc = cfgmod.load(args.config)
    full = cfgmod.resolve(doc)
    if args.seed is not None:
        full["seed"] = args.seed
    if args.out_dir:
        full["output"]["out_dir"] = args.out_dir
    rc, system, schedule = cfgmod.build(full)
    out = full["output"]["out_dir"]
    os.makedirs(out, exist_ok=True)

    log = run_closed_loop(rc, system, schedule)
    log.write_csv(os.path.join(out, "log.csv"))
    summary = log.summary(schedule, full)
    summary["mismatch_onsets"] = mismatch_onsets(schedule, rc.initial_data_mode)

    base = None
    if args.baseline:
        base = run_closed_loop(replace(rc, epsilon=math.inf), system, schedule)
        base.write_csv(os.path.join(out, "baseline_log.csv"))
        summary["baseline"] = base.summary(schedule)
    write_summary(summary, os.path.join(out, "summary.json"))

    # singular spectra of offline data for every mode
    rng = np.random.default_rng(rc.seed)
    spectra = []
    for k in range(len(system.modes)):
        w = generate_excited_trajectory(system, k, rc.initial_data_length,
                                        rng=np.random.default_rng(rng.integers(2 ** 63)), L=rc.L)
        spectra.append(singular_values(hankel(w, rc.L)))
    _write_rows(os.path.join(out, "fig1_singular_values.csv"),
                ["index"] + [f"mode{k}" for k in range(len(spectra))],
                [[i + 1] + [s[i] for s in spectra] for i in range(len(spectra[0]))])

    header = ["t", "r", "y", "u", "mode"] + (["y_baseline", "u_baseline"] if base else [])
    rows = []
    for i, rec in enumerate(log.records):
        row = [rec.t, rec.r, rec.y, rec.u, rec.mode]
        if base:
            row += [base.records[i].y, base.records[i].u]
        rows.append(row)
    _write_rows(os.path.join(out, "fig2_tracking.csv"), header, rows)
    _write_rows(os.path.join(out, "fig3_gap.csv"), ["t", "gap", "swap"],
                [[r.t, "" if math.isnan(r.gap) else _fmt(r.gap), int(r.swap)] for r in log.records])

    print(f"swaps,{' '.join(str(t) for t in log.swap_times)}")
    print(f"total_rmse,{_fmt(summary['total_rmse'])}")
    if base:
        print(f"baseline_total_rmse,{_fmt(summary['baseline']['total_rmse'])}")
    print(f"out_dir,{out}")
    return EXIT_OK


def _add_behavior_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--L", type=int, required=True, help="window depth")
    p.add_argument("--m", type=int, default=None, help="inputs (default: from CSV header)")
    p.add_argument("--lag", type=int, required=True, help="system lag")
    p.add_argument("--n", type=int, required=True, help="system order")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lgap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gap", help="L-gap between two trajectories")
    p.add_argument("file1")
    p.add_argument("file2")
    _add_behavior_flags(p)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("metrics", help="all principal-angle metrics between two trajectories")
    p.add_argument("file1")
    p.add_argument("file2")
    _add_behavior_flags(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("singular-values", help="singular spectrum of the Hankel matrix")
    p.add_argument("file")
    p.add_argument("--L", type=int, required=True)
    p.set_defaults(func=cmd_singular_values)

    p = sub.add_parser("ar-bounds", help="gap bounds for two SISO AR window models")
    p.add_argument("--a", type=float, nargs="+", required=True, help="a_0 .. a_{L-2}")
    p.add_argument("--b", type=float, nargs="+", required=True, help="b_0 .. b_{L-1}")
    p.add_argument("--a-tilde", type=float, nargs="+", required=True)
    p.add_argument("--b-tilde", type=float, nargs="+", required=True)
    p.add_argument("--L", type=int, default=None)
    p.set_defaults(func=cmd_ar_bounds)

    p = sub.add_parser("run", help="closed-loop mode recognition experiment")
    p.add_argument("--config", default=None, help="JSON config (defaults reproduce the case study)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--baseline", action="store_true", help="also run with recognition disabled")
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ExcitationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXCITATION
    except cfgmod.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (TrajectoryFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
