"""Command-line front end.

    optpwm optimize  --mode single --pulses 11 --mod-index 0.9 --inductance-uh 100 --out run/
    optpwm sweep     --axis m --values 0.75,0.8,0.85,0.9,0.95 --out table.csv
    optpwm reproduce --out tables/

Exit codes: 0 success, 2 usage error, 3 acceptance-band failure,
4 non-convergence (results are still written).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields, replace
from pathlib import Path

from optpwm.experiments import DEFAULT_R, ExperimentSpec, SpecError, reproduce_tables, run_point, run_sweep
from optpwm.report import spec_comment, write_current_csv, write_json, write_rows_csv
from optpwm.waveform import write_schedule_csv

EXIT_OK, EXIT_USAGE, EXIT_BANDS, EXIT_NONCONVERGED = 0, 2, 3, 4

log = logging.getLogger("optpwm")

# flag -> (spec field, converter)
_FLAGS = {
    "mode": ("mode", str),
    "vo": ("Vo", float),
    "freq": ("f", float),
    "mod_index": ("m", float),
    "pulses": ("pulses", int),
    "inductance_uh": ("L", lambda v: float(v) * 1e-6),
    "resistance": ("R", float),
    "im": ("Im", float),
    "restarts": ("restarts", int),
    "seed": ("seed", int),
    "max_iter": ("max_iter", int),
}


def _add_spec_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON experiment spec; flags override it")
    p.add_argument("--mode", choices=("single", "three"))
    p.add_argument("--vo", type=float, help="DC rail voltage [V] (default 300)")
    p.add_argument("--freq", type=float, help="fundamental frequency [Hz] (default 60)")
    p.add_argument("--mod-index", type=float, help="modulation index m, 0 < m < 1")
    p.add_argument("--pulses", type=int, help="N (single phase) or P (three phase), odd")
    p.add_argument("--inductance-uh", type=float, help="L [uH] (default 100)")
    r = p.add_mutually_exclusive_group()
    r.add_argument("--resistance", type=float, help=f"R [ohm] (default {DEFAULT_R})")
    r.add_argument("--r-from-im", action="store_true", default=None, help="solve R from the reference amplitude --im")
    p.add_argument("--im", type=float, help="reference current amplitude for --r-from-im [A] (default 10)")
    p.add_argument("--restarts", type=int, help="multistart count (default 16)")
    p.add_argument("--seed", type=int, help="multistart seed (default 0)")
    p.add_argument("--max-iter", type=int, help="iteration cap per start (default 500)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optpwm", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="optimise one operating point")
    _add_spec_args(p)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--samples", type=int, default=2000, help="current dump resolution")

    p = sub.add_parser("sweep", help="sweep one axis and write a CSV table")
    _add_spec_args(p)
    p.add_argument("--axis", choices=("m", "L", "N", "P"), required=True)
    p.add_argument("--values", required=True, help="comma separated; L in uH")
    p.add_argument("--out", type=Path, required=True, help="CSV path")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("reproduce", help="regenerate Tables I-V next to the published values")
    _add_spec_args(p)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=1)
    return parser


def resolve_spec(args, parser, default: ExperimentSpec | None = None) -> ExperimentSpec:
    spec = default or ExperimentSpec()
    if args.config is not None:
        try:
            data = json.loads(args.config.read_text())
            spec = ExperimentSpec.from_dict({**{f.name: getattr(spec, f.name) for f in fields(spec)}, **data})
        except (OSError, ValueError, TypeError) as exc:
            parser.error(f"bad --config: {exc}")
    overrides = {}
    for flag, (name, conv) in _FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[name] = conv(value)
    if args.r_from_im:
        overrides["r_from_im"] = True
        overrides["R"] = None
    elif "R" in overrides:
        overrides["r_from_im"] = False
    spec = replace(spec, **overrides)
    try:
        spec.check()
        spec.resolved_R()
    except (SpecError, ValueError) as exc:
        parser.error(str(exc))
    if spec.R is None and not spec.r_from_im:
        print(
            f"note: R not given, using the default R = {DEFAULT_R} ohm "
            "(the published tables do not state R)",
            file=sys.stderr,
        )
    return spec


def cmd_optimize(args, parser) -> int:
    spec = resolve_spec(args, parser)
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    result = run_point(spec)
    problem = spec.problem()
    resolved = spec.resolved()
    header = spec_comment(resolved)
    for tag, free in (("conv", problem.conventional()), ("opt", result["free"])):
        schedule = problem.schedule(free)
        write_schedule_csv(out / f"schedule_{tag}.csv", schedule, header)
        # CSV columns are fixed, so the degree view lives in the JSON
        result[f"instants_deg_{tag}"] = [360.0 * t / schedule.period for t in schedule.instants]
        write_current_csv(out / f"current_{tag}.csv", problem.current(free), args.samples, spec=resolved)
    write_json(out / "result.json", result)
    print(
        f"THD conv {result['thd_conv_pct']:.2f} %  opt {result['thd_opt_pct']:.2f} %  "
        f"improvement {result['improvement_pct']:.2f} %"
    )
    return EXIT_OK if result["converged"] else EXIT_NONCONVERGED


def _parse_values(axis: str, text: str, parser) -> list:
    try:
        raw = [v for v in text.split(",") if v.strip()]
        if axis in ("N", "P"):
            return [int(v) for v in raw]
        if axis == "L":
            return [float(v) * 1e-6 for v in raw]
        return [float(v) for v in raw]
    except ValueError as exc:
        parser.error(f"bad --values: {exc}")


def cmd_sweep(args, parser) -> int:
    spec = resolve_spec(args, parser)
    values = _parse_values(args.axis, args.values, parser)
    if not values:
        parser.error("--values is empty")
    try:
        rows = run_sweep(spec, args.axis, values, jobs=args.jobs)
    except SpecError as exc:
        parser.error(str(exc))
    columns = ["axis_value", "thd_conv_pct", "thd_opt_pct", "improvement_pct"]
    if any("error" in r for r in rows):
        columns.append("error")
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_rows_csv(args.out, rows, columns, spec=spec.resolved())
    for r in rows:
        print(",".join("" if r.get(c) is None else str(r.get(c)) for c in columns))
    failed = any("error" in r or not r.get("converged", False) for r in rows)
    return EXIT_NONCONVERGED if failed else EXIT_OK


def cmd_reproduce(args, parser) -> int:
    default = ExperimentSpec(r_from_im=True)
    spec = resolve_spec(args, parser, default)
    summary = reproduce_tables(args.out, spec, jobs=args.jobs)
    for name, table in summary["tables"].items():
        status = "ok" if all(table["checks"].values()) else "FAIL"
        print(f"Table {name}: {status}  {table['checks']}")
    print(summary["note"])
    return EXIT_OK if summary["all_bands_ok"] else EXIT_BANDS


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    handler = {"optimize": cmd_optimize, "sweep": cmd_sweep, "reproduce": cmd_reproduce}[args.command]
    return handler(args, parser)


if __name__ == "__main__":
    sys.exit(main())
