"""Command-line driver.

Subcommands: verify, bracket-table, lax-check, evolve, reconstruct, casimir.
Exit status is 0 when every check passes, 1 when a check fails and 2 on
usage errors.  Reports are JSON; only the ``generated_at`` field varies
between identical invocations.
"""

from __future__ import annotations

import argparse
import sys

from . import suites
from .defaults import defaults, render_defaults
from .expression import ExpressionError
from .grid import GridError
from .report import render_reports

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
VERIFY_TARGETS = ("grid", "algebra", "poisson", "hamiltonian")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser, case: bool = True):
    if case:
        p.add_argument("--case", choices=("mp", "plebanski"), default="mp")
    p.add_argument("--grid", type=int, default=None, help="points per axis")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    p.add_argument("--no-timestamp", action="store_true", help="omit generated_at from the report")


def build_parser() -> argparse.ArgumentParser:
    cfg = defaults()
    parser = _Parser(prog="heavenly", description="Checks for Lie-Poisson structures of heavenly equations.")
    parser.add_argument("--show-defaults", action="store_true", help="print the defaults table and exit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("verify", help="grid, loop algebra, Poisson operator and functional checks")
    p.add_argument("target", nargs="?", choices=VERIFY_TARGETS + ("all",), default="all")
    _common(p)

    p = sub.add_parser("bracket-table", help="Lie-Poisson bracket kernels against closed forms")
    _common(p)
    p.add_argument("--p", type=int, default=None, help="seed power (default: 0, -1 and the vanishing powers)")
    p.add_argument("--csv", default=None, help="write the sampled kernel values here")

    for name, help_text in (("lax-check", "Lax compatibility versus the heavenly equation"), ("casimir", "asymptotic Casimir defects")):
        p = sub.add_parser(name, help=help_text)
        _common(p)
        p.add_argument("--field", default=None, help="manufactured u; default: seeded random trigonometric jets")

    p = sub.add_parser("evolve", help="integrate a hierarchy flow and monitor conserved quantities")
    _common(p, case=False)
    p.add_argument("--flow", choices=("mp-y", "mp-t", "plebanski-t", "plebanski-y"), default=cfg["evolve"]["flow"])
    p.add_argument("--init", default=cfg["evolve"]["init"], help="v0 = u_x in x (mp flows) or u in x1, x2, y, t")
    p.add_argument("--dt", type=float, default=cfg["evolve"]["dt"])
    p.add_argument("--T", type=float, default=cfg["evolve"]["T"])
    p.add_argument("--csv", default=None, help="write time, H0, min_v, max_v here")
    p.add_argument("--dealias", action="store_true", help="apply the 2/3 rule to the right-hand side")

    p = sub.add_parser("reconstruct", help="rebuild int u_x^3 dx from its gradients")
    _common(p, case=False)
    p.add_argument("--init", default=cfg["reconstruct"]["init"], help="u_x as an expression in x")
    return parser


def _grid(args, key) -> int:
    if args.grid is not None:
        if args.grid < 8 or args.grid % 2:
            raise UsageError("--grid must be even and at least 8")
        return args.grid
    g = defaults()["grid"][key]
    return g[args.case] if isinstance(g, dict) else g


def _run(args):
    if args.command is None:
        raise UsageError("a subcommand is required")
    seed = args.seed if args.seed is not None else defaults()["seed"]
    cmd = args.command
    if cmd == "verify":
        n = _grid(args, "verify")
        targets = VERIFY_TARGETS if args.target == "all" else (args.target,)
        reports = []
        for t in targets:
            if t == "grid":
                reports += suites.grid_suite(n)
            elif t == "algebra":
                reports += suites.algebra_suite(min(n, 64), seed)
            elif t == "poisson":
                reports += suites.poisson_reports(n, seed, args.case)
            else:
                reports += suites.hamiltonian_reports(n, seed)
        return reports
    if cmd == "bracket-table":
        return suites.bracket_reports(args.case, _grid(args, "bracket-table"), seed, args.p, args.csv)
    if cmd == "lax-check":
        return suites.lax_reports(args.case, _grid(args, "lax-check"), seed, args.field)
    if cmd == "casimir":
        return suites.casimir_reports(args.case, _grid(args, "casimir"), seed, args.field)
    if cmd == "evolve":
        if args.dt <= 0 or args.T < 0:
            raise UsageError("--dt must be positive and --T non-negative")
        return suites.evolve_reports(args.flow, args.init, _grid(args, "evolve"), args.dt, args.T, args.csv, args.dealias)
    if cmd == "reconstruct":
        return suites.reconstruct_reports(args.init, _grid(args, "reconstruct"))
    raise UsageError(f"unknown subcommand {cmd!r}")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.show_defaults:
            sys.stdout.write(render_defaults())
            return EXIT_OK
        reports = _run(args)
    except (UsageError, ExpressionError, GridError, ValueError) as exc:
        print(f"heavenly: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render_reports(reports, timestamp=not args.no_timestamp)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for r in sorted(reports, key=lambda r: (r.check, r.case)):
        print(r.line(), file=sys.stderr)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
