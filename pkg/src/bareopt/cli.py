"""Command-line front end: single runs, experiment grids, diagnostics, ranking."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .benchmarks import get_objective
from .diagnostics import (
    diagnostics_basename,
    expected_solution_value,
    export_events_csv,
    export_histogram_json,
    export_trace_json,
    record_run,
    transmission_trace,
    wave_modulus,
)
from .harness import (
    ALGORITHMS,
    MULTIMODAL_FUNCTIONS,
    UNIMODAL_FUNCTIONS,
    aggregate,
    rank_algorithms,
    run_experiment,
    run_single,
    summary_dict,
    read_trials_csv,
    write_trials_csv,
)

_PRESETS = {
    "desk": {"dims": [10], "trials": 20, "max_fes": 50000},
    "full": {"dims": [30, 60, 100], "trials": 51, "max_fes": None},
}

# flag name -> (config field, applicable algorithms)
_OVERRIDE_FLAGS = {
    "k": ("k", ("bip",)),
    "amplitude_a": ("amplitude_a", ("bip",)),
    "anneal_tau": ("anneal_tau", ("bip",)),
    "scale_divisor": ("scale_divisor", ("bip",)),
    "min_scale": ("min_scale", ("bip",)),
    "bounds_policy": ("bounds_policy", ("bip",)),
    "pop": ("np_", ("bbpso", "bbfwa", "gbde")),
    "cr_mean": ("cr_mean", ("gbde",)),
    "cr_std": ("cr_std", ("gbde",)),
    "amp_init": ("amp_init", ("bbfwa",)),
    "amp_grow": ("amp_grow", ("bbfwa",)),
    "amp_shrink": ("amp_shrink", ("bbfwa",)),
}


def _parse_funcs(text: str) -> list[str]:
    """Expand a comma list with F-ranges, e.g. 'F1-F3,F7' -> F1 F2 F3 F7."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        if sep and lo.upper().startswith("F") and hi.upper().startswith("F"):
            a, b = int(lo[1:]), int(hi[1:])
            out.extend(f"F{i}" for i in range(a, b + 1))
        else:
            out.append(part)
    if not out:
        raise ValueError("no functions given")
    return out


def _parse_group(text: str, available) -> list[str]:
    key = text.strip().lower()
    if key in ("multimodal", "f1-f6"):
        return list(MULTIMODAL_FUNCTIONS)
    if key in ("unimodal", "f7-f12"):
        return list(UNIMODAL_FUNCTIONS)
    if key == "all":
        return list(available)
    return _parse_funcs(text)


def _parse_init(text: str) -> list[float]:
    return [float(v) for v in text.split(",")]


def _add_run_flags(p: argparse.ArgumentParser, threshold_default: float):
    p.add_argument("--algo", required=True, choices=ALGORITHMS)
    p.add_argument("--func", required=True, help="objective name, e.g. F7 or double_well")
    p.add_argument("--dim", type=int, default=10)
    p.add_argument("--max-fes", type=int, default=None,
                   help="evaluation budget (default 10000*dim)")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--success-threshold", type=float, default=threshold_default)
    p.add_argument("--init", type=str, default=None,
                   help="comma-separated start point, every particle begins there (bip only)")
    p.add_argument("--k", type=int, default=None, help="bip population size")
    p.add_argument("--amplitude-a", type=float, default=None)
    p.add_argument("--anneal-tau", type=float, default=None)
    p.add_argument("--scale-divisor", type=float, default=None)
    p.add_argument("--min-scale", type=float, default=None)
    p.add_argument("--bounds-policy", choices=("clamp", "reflect", "resample"),
                   default=None)
    p.add_argument("--no-mean-replace", action="store_true",
                   help="disable the population-mean collapse step (bip only)")
    p.add_argument("--pop", type=int, default=None, help="baseline population size")
    p.add_argument("--cr-mean", type=float, default=None)
    p.add_argument("--cr-std", type=float, default=None)
    p.add_argument("--amp-init", type=float, default=None)
    p.add_argument("--amp-grow", type=float, default=None)
    p.add_argument("--amp-shrink", type=float, default=None)


def _collect_overrides(args) -> dict:
    overrides = {}
    for flag, (field, algos) in _OVERRIDE_FLAGS.items():
        value = getattr(args, flag, None)
        if value is None:
            continue
        if args.algo not in algos:
            raise ValueError(f"--{flag.replace('_', '-')} does not apply to {args.algo}")
        overrides[field] = value
    if getattr(args, "no_mean_replace", False):
        if args.algo != "bip":
            raise ValueError("--no-mean-replace does not apply to " + args.algo)
        overrides["mean_replace"] = False
    return overrides


def _effective_config(args, overrides, max_fes) -> dict:
    return {
        "algorithm": args.algo,
        "function": args.func,
        "dim": args.dim,
        "max_fes": max_fes,
        "seed": args.seed,
        "success_threshold": args.success_threshold,
        "init": None if args.init is None else _parse_init(args.init),
        "overrides": overrides,
    }


def cmd_run(args) -> int:
    get_objective(args.func, args.dim)  # validate the name early
    max_fes = args.max_fes if args.max_fes is not None else 10000 * args.dim
    if max_fes < 1:
        raise ValueError("--max-fes must be positive")
    overrides = _collect_overrides(args)
    init = None if args.init is None else _parse_init(args.init)
    outcome = run_single(
        args.algo, args.func, args.dim,
        max_fes=max_fes, seed=args.seed,
        success_threshold=args.success_threshold,
        overrides=overrides, init_position=init,
    )
    print(f"algorithm={outcome.algorithm} function={outcome.function} "
          f"dim={outcome.dim} seed={outcome.seed}")
    print(f"final_error={outcome.final_error:.6e} evals_used={outcome.evals_used} "
          f"succeeded={'true' if outcome.succeeded else 'false'}")
    if args.out is not None:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        base = diagnostics_basename(args.algo, args.func, args.dim, args.seed)
        payload = {
            "effective_config": _effective_config(args, overrides, max_fes),
            "final_error": outcome.final_error,
            "evals_used": outcome.evals_used,
            "succeeded": outcome.succeeded,
            "best_fitness": outcome.best_fitness,
            "best_position": None if outcome.best_position is None
            else [float(v) for v in outcome.best_position],
            "error_trace": [[int(i), float(e)] for i, e in outcome.error_trace],
        }
        path = out_dir / f"run_{base}.json"
        path.write_text(json.dumps(payload, indent=2))
        print(f"wrote {path}")
    return 0


def cmd_experiment(args) -> int:
    if args.preset is not None:
        preset = _PRESETS[args.preset]
        if args.dims is None:
            args.dims = ",".join(str(d) for d in preset["dims"])
        if args.trials is None:
            args.trials = preset["trials"]
        if args.max_fes is None:
            args.max_fes = preset["max_fes"]
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    for a in algos:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}; known: {ALGORITHMS}")
    funcs = _parse_funcs(args.funcs)
    for f in funcs:
        get_objective(f, 2)
    dims = [int(d) for d in (args.dims or "10").split(",")]
    trials = args.trials if args.trials is not None else 20
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    outcomes = []
    cell_stats = {}
    failures = []
    for algo in algos:
        for func in funcs:
            for dim in dims:
                max_fes = args.max_fes if args.max_fes is not None else 10000 * dim
                try:
                    cell = run_experiment(
                        algo, func, dim,
                        n_trials=trials, max_fes=max_fes,
                        base_seed=args.base_seed,
                        success_threshold=args.success_threshold,
                        workers=args.workers,
                    )
                except Exception as exc:  # keep the grid going
                    failures.append({"algorithm": algo, "function": func,
                                     "dim": dim, "error": f"{type(exc).__name__}: {exc}"})
                    print(f"FAILED {algo} {func} {dim}d: {exc}", file=sys.stderr)
                    continue
                outcomes.extend(cell)
                stats = aggregate(cell, args.success_threshold)
                cell_stats[(algo, func, dim)] = stats
                print(f"{algo:6s} {func:12s} {dim:4d}d  best={stats.best:.3e} "
                      f"mean={stats.mean:.3e} std={stats.std:.3e} sr={stats.sr:.2f}")

    rankings = {}
    for dim in dims:
        per_dim = {(a, f): s for (a, f, d), s in cell_stats.items() if d == dim}
        done_funcs = [f for f in funcs
                      if all((a, f) in per_dim for a in algos)]
        groups = {
            f"all_{dim}d": done_funcs,
            f"multimodal_{dim}d": [f for f in done_funcs if f in MULTIMODAL_FUNCTIONS],
            f"unimodal_{dim}d": [f for f in done_funcs if f in UNIMODAL_FUNCTIONS],
        }
        for label, group in groups.items():
            if group and per_dim:
                rankings[label] = rank_algorithms(per_dim, group)

    trials_path = out_dir / "trials.csv"
    write_trials_csv(trials_path, outcomes)
    summary = summary_dict(
        cell_stats, rankings,
        success_threshold=args.success_threshold,
        max_fes=args.max_fes, n_trials=trials, base_seed=args.base_seed,
    )
    if failures:
        summary["failures"] = failures
    summary_path = out_dir / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2))
    print(f"wrote {trials_path} and {summary_path}")
    for label, table in rankings.items():
        avg = "  ".join(f"{a}={table.average[a]:.2f}" for a in table.algorithms)
        print(f"average rank [{label}]: {avg}")
    return 1 if failures else 0


def cmd_diagnose(args) -> int:
    get_objective(args.func, args.dim)
    max_fes = args.max_fes if args.max_fes is not None else 10000 * args.dim
    if max_fes < 1:
        raise ValueError("--max-fes must be positive")
    overrides = _collect_overrides(args)
    init = None if args.init is None else _parse_init(args.init)
    outcome, log = record_run(
        args.algo, args.func, args.dim,
        max_fes=max_fes, seed=args.seed,
        success_threshold=args.success_threshold,
        overrides=overrides, init_position=init,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    base = diagnostics_basename(args.algo, args.func, args.dim, args.seed)
    meta = {"algorithm": args.algo, "function": args.func,
            "dim": args.dim, "seed": args.seed}

    events_path = out_dir / f"events_{base}.csv"
    export_events_csv(log, events_path)
    hist = wave_modulus(log, bins_per_dim=args.bins)
    hist_path = out_dir / f"histogram_{base}.json"
    export_histogram_json(hist, hist_path, meta)
    trace = transmission_trace(log)
    trace_path = out_dir / f"trace_{base}.json"
    export_trace_json(trace, trace_path, meta)

    print(f"final_error={outcome.final_error:.6e} evals_used={outcome.evals_used}")
    print(f"expected_solution_value={expected_solution_value(log):.6e}")
    if not hist.marginal:
        cell = hist.mode_cell()
        bounds = ", ".join(f"[{lo:.3f}, {hi:.3f}]" for lo, hi in hist.cell_bounds(cell))
        print(f"mode_cell={cell} bounds=({bounds})")
    print(f"tunneling_decisions={len(trace)}")
    print(f"wrote {events_path}, {hist_path}, {trace_path}")
    return 0


def cmd_rank(args) -> int:
    rows = read_trials_csv(args.csv)
    if not rows:
        raise ValueError(f"{args.csv}: no data rows")
    dims = sorted({r["dim"] for r in rows})
    if args.dim is not None:
        rows = [r for r in rows if r["dim"] == args.dim]
        if not rows:
            raise ValueError(f"no rows with dim {args.dim}")
    elif len(dims) > 1:
        raise ValueError(f"CSV holds several dims {dims}; pick one with --dim")
    funcs_present = []
    for r in rows:
        if r["function"] not in funcs_present:
            funcs_present.append(r["function"])
    group = _parse_group(args.group, funcs_present)
    sums: dict = {}
    counts: dict = {}
    for r in rows:
        key = (r["algorithm"], r["function"])
        sums[key] = sums.get(key, 0.0) + r["final_error"]
        counts[key] = counts.get(key, 0) + 1
    means = {key: sums[key] / counts[key] for key in sums}
    table = rank_algorithms(means, group)
    payload = table.as_dict()
    text = json.dumps(payload, indent=2)
    if args.out is not None:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "ranks.json").write_text(text)
    print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bareopt",
        description="Bare-bones global optimizers and their benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="one seeded trial")
    _add_run_flags(p_run, threshold_default=0.0)
    p_run.add_argument("--out", type=str, default=None,
                       help="directory for the run JSON (optional)")
    p_run.set_defaults(func_cmd=cmd_run)

    p_exp = sub.add_parser("experiment", help="grid of seeded trials")
    p_exp.add_argument("--algos", type=str, default=",".join(ALGORITHMS))
    p_exp.add_argument("--funcs", type=str, default="F1-F12")
    p_exp.add_argument("--dims", type=str, default=None,
                       help="comma-separated dimensions (default 10)")
    p_exp.add_argument("--trials", type=int, default=None)
    p_exp.add_argument("--max-fes", type=int, default=None,
                       help="budget per trial (default 10000*dim)")
    p_exp.add_argument("--base-seed", type=int, default=1)
    p_exp.add_argument("--success-threshold", type=float, default=1e-8)
    p_exp.add_argument("--workers", type=int, default=1)
    p_exp.add_argument("--preset", choices=sorted(_PRESETS), default=None)
    p_exp.add_argument("--out", type=str, default="results")
    p_exp.set_defaults(func_cmd=cmd_experiment)

    p_diag = sub.add_parser("diagnose", help="one trial with full event capture")
    _add_run_flags(p_diag, threshold_default=0.0)
    p_diag.add_argument("--bins", type=int, default=50)
    p_diag.add_argument("--out", type=str, default="diagnostics")
    p_diag.set_defaults(func_cmd=cmd_diagnose)

    p_rank = sub.add_parser("rank", help="average ranks from a trials CSV")
    p_rank.add_argument("--csv", type=str, required=True)
    p_rank.add_argument("--group", type=str, default="all",
                        help="multimodal, unimodal, all, or a function list")
    p_rank.add_argument("--dim", type=int, default=None)
    p_rank.add_argument("--out", type=str, default=None)
    p_rank.set_defaults(func_cmd=cmd_rank)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func_cmd(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
