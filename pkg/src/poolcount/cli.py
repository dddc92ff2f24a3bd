"""Command line front end.

Subcommands:
  simulate  run one estimator over a d-grid, emit per-point CSV
  bounds    evaluate closed-form query bounds
  sweep     simulate + bound comparison, exit 1 on any hard failure
  fixtures  refit bound constants and report drift against frozen values

Option precedence is flag > config file > built-in default. Machine output
(CSV, JSON, bare numbers) goes to stdout or --out; progress and human
summaries go to stderr so pipelines stay clean.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .bounds import BOUND_NAMES, BoundQuery, evaluate
from .estimators import EstimatorConfig
from .fitted import FITTED
from .harness import (
    ESTIMATOR_NAMES,
    SAMPLER_NAMES,
    ExperimentSpec,
    compare_with_bounds,
    fit_constants,
    run_experiment,
    statistics_to_csv,
    statistics_to_json,
)

_DEFAULTS = {
    "epsilon": 0.5,
    "delta": 0.1,
    "wrapper_exponent": 2.0,
    "trials": 1000,
    "seed": 0,
    "jobs": 1,
    "sampler": "uniform-random",
    "estimator": "monte-carlo",
}


def _load_config(path: str) -> dict:
    text = Path(path).read_text()
    if path.endswith(".toml"):
        try:
            import tomllib  # py311+
        except ModuleNotFoundError:
            import tomli as tomllib
        return tomllib.loads(text)
    return json.loads(text)


def _resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and explicit flags, in that order."""
    merged = dict(_DEFAULTS)
    config_path = getattr(args, "config", None)
    if config_path:
        file_values = _load_config(config_path)
        unknown = set(file_values) - set(_DEFAULTS)
        if unknown:
            raise ValueError(f"config file sets unknown keys: {sorted(unknown)}")
        merged.update(file_values)
    # argparse.SUPPRESS keeps unset flags out of the namespace entirely
    merged.update({k: v for k, v in vars(args).items() if k in _DEFAULTS})
    return merged


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE",
                        help="JSON or TOML file of defaults (.toml needs that suffix)")
    parser.add_argument("--eps", dest="epsilon", type=float, default=argparse.SUPPRESS,
                        metavar="E", help="accuracy target, estimate within (1±E)d")
    parser.add_argument("--delta", type=float, default=argparse.SUPPRESS,
                        metavar="D", help="failure probability budget")
    parser.add_argument("--c", dest="wrapper_exponent", type=float,
                        default=argparse.SUPPRESS, metavar="C",
                        help="zero-shortcut exponent for the expected-cost estimator")


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--estimator", choices=ESTIMATOR_NAMES, default=argparse.SUPPRESS)
    parser.add_argument("--sampler", choices=SAMPLER_NAMES, default=argparse.SUPPRESS)
    parser.add_argument("--trials", type=int, default=argparse.SUPPRESS, metavar="T")
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS, metavar="S")
    parser.add_argument("--jobs", type=int, default=argparse.SUPPRESS, metavar="J")
    parser.add_argument("--out", metavar="FILE", help="write machine output here instead of stdout")
    parser.add_argument("--json", action="store_true", dest="as_json",
                        help="emit a JSON summary instead of CSV")
    parser.add_argument("-n", "--items", type=int, required=True, metavar="N",
                        help="universe size")
    parser.add_argument("-d", "--defectives", type=int, nargs="+", required=True,
                        metavar="D", help="defective counts to test, one point each")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poolcount",
        description="Estimate how many marked items a pooled membership oracle hides.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Monte Carlo run of one estimator")
    _add_common(sim)
    _add_run_options(sim)

    bnd = sub.add_parser("bounds", help="evaluate closed-form query bounds")
    _add_common(bnd)
    bnd.add_argument("name", choices=list(BOUND_NAMES) + ["all"])
    bnd.add_argument("-n", "--items", type=int, required=True, metavar="N")
    bnd.add_argument("-d", "--defectives", type=int, required=True, metavar="D")
    bnd.add_argument("--fitted", action="store_true",
                     help="use frozen fitted constants where the bound has them")
    bnd.add_argument("--json", action="store_true", dest="as_json")
    bnd.add_argument("--out", metavar="FILE")

    swp = sub.add_parser("sweep", help="simulate then compare against bounds")
    _add_common(swp)
    _add_run_options(swp)

    fix = sub.add_parser("fixtures", help="refit bound constants, report drift")
    fix.add_argument("--seed", type=int, default=argparse.SUPPRESS, metavar="S")
    fix.add_argument("--out", metavar="FILE")

    return parser


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _spec_from(args: argparse.Namespace, merged: dict) -> ExperimentSpec:
    config = EstimatorConfig(
        epsilon=merged["epsilon"],
        delta=merged["delta"],
        wrapper_exponent=merged["wrapper_exponent"],
    )
    return ExperimentSpec(
        estimator=merged["estimator"],
        n=args.items,
        d_values=tuple(args.defectives),
        config=config,
        trials=merged["trials"],
        master_seed=merged["seed"],
        sampler=merged["sampler"],
        jobs=merged["jobs"],
    )


def _cmd_simulate(args: argparse.Namespace) -> int:
    spec = _spec_from(args, _resolve(args))
    stats = run_experiment(spec)
    if args.as_json:
        _emit(statistics_to_json(spec, stats), args.out)
    else:
        _emit(statistics_to_csv(stats), args.out)
    for stat in stats:
        print(
            f"d={stat.d}: success {stat.successes}/{stat.trials} "
            f"(wilson [{stat.wilson_low:.4f}, {stat.wilson_high:.4f}]), "
            f"mean queries {stat.queries_mean:.1f}",
            file=sys.stderr,
        )
    return 0


def _cmd_bounds(args: argparse.Namespace) -> int:
    merged = _resolve(args)
    constants = None
    if args.fitted:
        constants = {"c1": FITTED["expected_c1"], "c2": FITTED["expected_c2"]}
    names = list(BOUND_NAMES) if args.name == "all" else [args.name]
    rows = []
    for name in names:
        if args.fitted and name == "mc_upper":
            constants = {"c1": FITTED["mc_c1"], "c2": FITTED["mc_c2"]}
        value = evaluate(
            BoundQuery(
                name,
                n=args.items,
                d=args.defectives,
                epsilon=merged["epsilon"],
                delta=merged["delta"],
                wrapper_exponent=merged["wrapper_exponent"],
            ),
            constants=constants if name in ("expected_upper", "mc_upper") else None,
        )
        rows.append({
            "name": name, "value": value.value, "asymptotic": value.asymptotic,
            "clamped": value.clamped, "log2_value": value.log2_value,
        })
    if args.as_json:
        _emit(json.dumps(rows if len(rows) > 1 else rows[0], indent=2), args.out)
    elif len(rows) == 1:
        _emit(repr(rows[0]["value"]), args.out)
    else:
        width = max(len(r["name"]) for r in rows)
        lines = []
        for r in rows:
            note = " (asymptotic shape, unfitted)" if r["asymptotic"] else ""
            lines.append(f"{r['name']:<{width}}  {r['value']!r}{note}")
        _emit("\n".join(lines), args.out)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    spec = _spec_from(args, _resolve(args))
    stats = run_experiment(spec)
    report = compare_with_bounds(stats)
    _emit(statistics_to_json(spec, stats, bounds_report=report), args.out)
    failures = 0
    for row in report:
        if row["kind"] != "hard":
            continue
        ok = row["passed"]
        failures += 0 if ok else 1
        print(
            f"[{'pass' if ok else 'FAIL'}] {row['estimator']} n={row['n']} d={row['d']} "
            f"{row['metric']} = {row['empirical']:.1f} vs bound {row['bound']:.1f}",
            file=sys.stderr,
        )
    return 1 if failures else 0


def _cmd_fixtures(args: argparse.Namespace) -> int:
    seed = getattr(args, "seed", 20260821)
    refit = fit_constants(master_seed=seed)
    rows = []
    drifted = False
    for key in sorted(FITTED):
        frozen = FITTED[key]
        measured = refit.get(key)
        # frozen values carry headroom; drift means measurement exceeds them
        exceeded = measured is not None and measured > frozen
        drifted = drifted or exceeded
        rows.append({"constant": key, "frozen": frozen, "measured": measured,
                     "within_frozen": not exceeded})
    _emit(json.dumps(rows, indent=2), args.out)
    for row in rows:
        mark = "ok " if row["within_frozen"] else "OVER"
        print(f"[{mark}] {row['constant']}: measured {row['measured']!r} "
              f"vs frozen {row['frozen']!r}", file=sys.stderr)
    return 1 if drifted else 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "bounds": _cmd_bounds,
    "sweep": _cmd_sweep,
    "fixtures": _cmd_fixtures,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        parser.exit(2, f"error: {exc}\n")
        return 2  # unreachable, keeps type checkers calm


if __name__ == "__main__":
    sys.exit(main())
