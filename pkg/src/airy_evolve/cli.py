"""Command line entry point ``airy-evolve``."""

from __future__ import annotations

import argparse
import sys

from .errors import ConvergenceError, DomainError, StepSizeError, WidenDomainError
from .scenarios import DEFAULT_OUT, KINDS, PARAMS, ConfigError, Scenario, load_config, resolve_output, run_scenarios


HELP = {
    "heat": "heat flow with a linear term (Gaussian or Airy initial data)",
    "schrodinger": "Schrodinger evolution in a linear potential",
    "airy-packet": "closed-form Airy packet snapshots and peak trajectory",
    "transform": "Gauss-Weierstrass, Airy or cubic-evolution transform of a Gaussian",
    "poly": "exact coefficient table of heat, Airy or higher-order Hermite polynomials",
    "wei-norman": "ordering functions a, b, c, d for time-dependent coefficients",
    "centroid": "Airy-coordinate centroid trajectory under a time-dependent force",
    "validate": "run named numerical checks ('all' by default)",
}


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="airy-evolve",
        description="Linear-potential evolution, Airy packets and Airy/Gauss-Weierstrass transforms.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run every scenario of a config file")
    run.add_argument("config", help="INI file with [scenario NAME] sections")
    run.add_argument("--out", default=None)
    run.add_argument("--parallel", action="store_true", default=None)
    for kind in KINDS:
        p = sub.add_parser(kind, help=HELP[kind], description=HELP[kind])
        p.add_argument("--config", default=None, help="INI file; runs its scenarios of this kind")
        p.add_argument("--out", default=None, help=f"output directory (default {DEFAULT_OUT})")
        p.add_argument("--name", default=kind, help="scenario name (CSV file stem)")
        p.add_argument("--parallel", action="store_true", default=None)
        for name, (typ, default) in PARAMS[kind].items():
            if kind == "validate" and name == "checks":
                p.add_argument("checks", nargs="*", default=None, help="check names or 'all'")
                continue
            p.add_argument(_flag(name), dest=name, default=None, metavar=name.upper(),
                           help=f"default {default}")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config is not None:
            cfg = load_config(args.config)
            scenarios = [s for s in cfg.scenarios if args.command == "run" or s.kind == args.command]
            parallel = cfg.parallel if args.parallel is None else args.parallel
            manifest = run_scenarios(scenarios, resolve_output(args.out or cfg.output), parallel)
        else:
            raw = {name: getattr(args, name) for name in PARAMS[args.command]
                   if getattr(args, name, None) is not None}
            if args.command == "validate":
                raw["checks"] = ",".join(args.checks) if args.checks else "all"
            scenario = Scenario.build(args.name, args.command, raw)
            manifest = run_scenarios([scenario], resolve_output(args.out or DEFAULT_OUT), bool(args.parallel))
    except ConfigError as exc:
        print(f"airy-evolve: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ConvergenceError, StepSizeError, WidenDomainError) as exc:
        print(f"airy-evolve: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    for result in manifest["scenarios"]:
        for check in result["checks"]:
            status = "PASS" if check["passed"] else "FAIL"
            print(f"{status} {result['name']}: {check['name']} = {check['value']:.3e} "
                  f"(tol {check['tolerance']})")
    return 0 if manifest["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
