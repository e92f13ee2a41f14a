"""Command-line front end: reproductions, property suites, integrals, classification.

Every command prints a JSON report body (no timing) on stdout, so repeated
runs are byte-identical.  ``--out`` writes the full report, timing included.
Exit codes: 0 when every record passes, 1 when one fails, 2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from .grid_space import RegionSpecError, SpaceMismatch
from .measures import EXTENSION_MODES, SignedMeasureError
from .quasi_integral import integrate, write_steps_csv
from .report import Record, Report
from .scenarios import BUILTINS, ScenarioError, dump_builtin, resolve
from .suites import REPRODUCTIONS, SUITES, classify_measure, reproduce, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Bad command-line input; reported with exit code 2."""


def _add_common(p: argparse.ArgumentParser, seed=True, cases=True):
    p.add_argument("--scenario", help=f"scenario JSON file or built-in name ({', '.join(BUILTINS)})")
    p.add_argument("--resolution", type=int, help="grid resolution for built-in scenarios")
    p.add_argument("--extension-mode", choices=EXTENSION_MODES, help="override the extension mode of parliamentary measures")
    p.add_argument("--out", help="write the full report (with timing) to this path")
    if seed:
        p.add_argument("--seed", type=int, help="random seed (defaults to the scenario seed)")
    if cases:
        p.add_argument("--cases", type=int, default=200, help="number of randomized cases")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dtmint", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reproduce", help="reproduce a worked example")
    p.add_argument("name", choices=sorted(REPRODUCTIONS))
    p.add_argument("--resolution", type=int, help="cells per axis (default 400, or 1200 in 1-D)")
    p.add_argument("--out", help="write the full report (with timing) to this path")

    p = sub.add_parser("suite", help="run a property suite over a scenario")
    p.add_argument("name", choices=sorted(SUITES))
    _add_common(p)

    p = sub.add_parser("integrate", help="quasi-integral of a scenario function")
    _add_common(p, seed=False, cases=False)
    p.add_argument("--measure", required=True)
    p.add_argument("--function", required=True, help="function name or expression in x, y")
    p.add_argument("--region", help="region name or expression (default: the whole space)")
    p.add_argument("--emit-steps", metavar="PATH", help="write the two distribution step functions as CSV")

    p = sub.add_parser("classify", help="DTM / TM / measure verdicts for a scenario measure")
    _add_common(p)
    p.add_argument("--measure", required=True)

    p = sub.add_parser("scenario", help="print a built-in scenario as JSON")
    p.add_argument("name", choices=sorted(BUILTINS))
    p.add_argument("--resolution", type=int)
    return parser


def _scenario(args):
    if args.resolution is not None and args.resolution < 1:
        raise InputError("--resolution must be positive")
    return resolve(args.scenario, args.resolution, args.extension_mode)


def _cases(args):
    if args.cases < 1:
        raise InputError("--cases must be positive")
    return args.cases


def cmd_reproduce(args) -> Report:
    if args.resolution is not None and args.resolution < 4:
        raise InputError("--resolution must be at least 4")
    return reproduce(args.name, args.resolution)


def cmd_suite(args) -> Report:
    return run_suite(args.name, _scenario(args), args.seed, _cases(args))


def cmd_integrate(args) -> Report:
    sc = _scenario(args)
    m = sc.measure(args.measure)
    f = sc.function(args.function)
    A = sc.region(args.region)
    t0 = time.perf_counter()
    res = integrate(m, f, A)
    rep = Report({"command": "integrate", "scenario": sc.name, "measure": args.measure, "function": args.function, "region": args.region})
    rep.add(Record("integral", True, None, res.value, detail={"bounds": list(res.bounds_used), "mass": res.mass, "breakpoints": len(res.r1.breakpoints)}))
    rep.timing["seconds"] = time.perf_counter() - t0
    if args.emit_steps:
        write_steps_csv(res, args.emit_steps)
    print(f"{res.value!r}", file=sys.stderr)
    return rep


def cmd_classify(args) -> Report:
    sc = _scenario(args)
    rep = classify_measure(sc, args.measure, args.seed, _cases(args))
    print(rep.records[-1].actual, file=sys.stderr)
    return rep


COMMANDS = {
    "reproduce": cmd_reproduce,
    "suite": cmd_suite,
    "integrate": cmd_integrate,
    "classify": cmd_classify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "scenario":
        print(dump_builtin(args.name, args.resolution))
        return EXIT_OK
    try:
        rep = COMMANDS[args.command](args)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(rep.to_json(timing=True) + "\n")
    except (InputError, ScenarioError, RegionSpecError, SpaceMismatch, SignedMeasureError, OSError, ValueError) as exc:
        print(f"dtmint: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(json.dumps(rep.body(), indent=2))
    failed = rep.failures()
    for r in failed:
        print(f"FAIL {r.name}: expected {r.expected}, got {r.actual}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
