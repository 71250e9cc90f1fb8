"""Command-line front end: ``orlicz-polar {eval,solve,experiment,validate}``."""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import config
from .bodies import Ball
from .errors import InvalidInputError, NumericalError
from .experiments import REGISTRY, registry_names, run_experiment, write_report
from .functionals import (
    DiscreteMeasure,
    dual_volume,
    general_volume,
    homogeneous_dual_volume,
    homogeneous_general_volume,
    orlicz_norm,
    validate_g,
    validate_phi,
)
from .solver import solve_discrete
from .sphere import product_rule

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC, EXIT_UNCONVERGED = 0, 1, 2, 3, 4

FUNCTIONALS = ("dual", "hat-dual", "general", "hat-general", "orlicz-norm")


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2)


def cmd_eval(args) -> int:
    start = time.perf_counter()
    body = config.load_body(config.read_json(args.body)) if args.body else None
    if args.functional == "orlicz-norm":
        if args.phi is None:
            raise InvalidInputError("orlicz-norm needs --phi")
        phi = config.load_phi(config.read_json(args.phi))
        validate_phi(phi)
        if args.measure is None:
            raise InvalidInputError("orlicz-norm needs --measure")
        measure, h = config.load_measure(config.read_json(args.measure))
        if h is None:
            h = np.ones(len(measure)) if body is None else body
        value = orlicz_norm(h, measure, phi)
        resolution = None
    else:
        if body is None:
            raise InvalidInputError(f"{args.functional} needs --body")
        if args.g is None:
            raise InvalidInputError(f"{args.functional} needs --g")
        n = body.dimension
        rule = product_rule(n, args.resolution)
        g = config.load_g(config.read_json(args.g), n)
        validate_g(g, n, rule)
        func = {
            "dual": dual_volume,
            "hat-dual": homogeneous_dual_volume,
            "general": general_volume,
            "hat-general": homogeneous_general_volume,
        }[args.functional]
        value = func(g, body, rule)
        resolution = rule.resolution
    elapsed = int(round(1000 * (time.perf_counter() - start)))
    print(_dump({"functional": args.functional, "value": value, "resolution": resolution, "runtime_ms": elapsed}))
    return EXIT_OK


def cmd_solve(args) -> int:
    spec = config.load_instance(config.read_json(args.instance))
    sol = solve_discrete(spec, starts=args.starts, budget=args.budget, threads=args.threads)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    doc = {"instance": spec.to_dict(), "solution": sol.to_dict()}
    (out / "solution.json").write_text(_dump(doc) + "\n", encoding="utf-8")
    (out / "polytope.json").write_text(_dump(sol.polytope.to_dict()) + "\n", encoding="utf-8")
    print(_dump({"objective_value": sol.objective_value, "constraint_residual": sol.constraint_residual, "converged": sol.converged}))
    if not sol.converged:
        print("solver did not converge within budget; results written anyway", file=sys.stderr)
        return EXIT_UNCONVERGED
    return EXIT_OK


def _overrides(pairs) -> dict:
    result = {}
    for pair in pairs or []:
        key, sep, raw = pair.partition("=")
        if not sep:
            raise InvalidInputError(f"override {pair!r} must look like key=value")
        try:
            result[key] = json.loads(raw)
        except json.JSONDecodeError:
            result[key] = raw
    return result


def cmd_experiment(args) -> int:
    if args.all:
        names = registry_names()
    else:
        unknown = [n for n in args.name if n not in REGISTRY]
        if unknown:
            raise InvalidInputError(f"unknown experiment(s) {unknown}; registered: {', '.join(registry_names())}")
        names = args.name
    overrides = _overrides(args.set)
    if overrides and len(names) != 1:
        raise InvalidInputError("--set applies to a single --name")
    reports = []
    for name in names:
        report = run_experiment(name, overrides)
        if args.out:
            write_report(report, args.out)
        reports.append(report)
        print(f"{'PASS' if report.passed else 'FAIL'} {name} ({report.runtime_ms} ms)", file=sys.stderr)
    summary = {
        "total": len(reports),
        "passed": sum(r.passed for r in reports),
        "failed": [r.name for r in reports if not r.passed],
        "results": {r.name: {"passed": r.passed, "metrics": r.metrics} for r in reports},
    }
    if args.out:
        Path(args.out, "summary.json").write_text(_dump(summary) + "\n", encoding="utf-8")
    print(_dump(summary))
    return EXIT_OK if not summary["failed"] else EXIT_FAIL


def cmd_validate(args) -> int:
    checked = []
    if args.instance:
        config.load_instance(config.read_json(args.instance))
        checked.append("instance")
    body = None
    if args.body:
        body = config.load_body(config.read_json(args.body))
        checked.append("body")
    if args.g:
        n = args.dimension or (body.dimension if body is not None else 3)
        validate_g(config.load_g(config.read_json(args.g), n), n)
        checked.append("g")
    if args.phi:
        validate_phi(config.load_phi(config.read_json(args.phi)))
        checked.append("phi")
    if not checked:
        raise InvalidInputError("nothing to validate; pass --instance, --body, --g or --phi")
    print(_dump({"valid": True, "checked": checked}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orlicz-polar", description="Dual-polar Orlicz-Minkowski toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a functional")
    p.add_argument("--functional", choices=FUNCTIONALS, required=True)
    p.add_argument("--body", help="body JSON file or inline JSON")
    p.add_argument("--g", help='G as JSON, e.g. \'{"kind": "power", "q": 3}\'')
    p.add_argument("--phi", help='phi as JSON, e.g. \'{"kind": "power", "p": 2}\'')
    p.add_argument("--measure", help="atoms (and optional h values) for orlicz-norm")
    p.add_argument("--resolution", type=int, default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("solve", help="solve a discrete instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--starts", type=int, default=8)
    p.add_argument("--budget", type=int, default=3000)
    p.add_argument("--threads", type=int, default=None, help="parallel starts (default: ORLICZ_POLAR_THREADS or 1)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("experiment", help="run registered experiments")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--name", action="append")
    group.add_argument("--all", action="store_true")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override an experiment setting (JSON value)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("validate", help="schema-check configuration documents")
    p.add_argument("--instance")
    p.add_argument("--body")
    p.add_argument("--g")
    p.add_argument("--phi")
    p.add_argument("--dimension", type=int)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
