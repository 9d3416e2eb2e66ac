"""Command-line front end: ``radplan validate|pf|plan|sweep``.

Exit codes: 0 success, 1 usage error, 2 bad input, 3 no feasible design.
"""
from __future__ import annotations

import argparse
import os
import sys
from decimal import Decimal, InvalidOperation
from typing import Sequence

from .bspso import SwarmConfig
from .netmodel import CaseError, Design, load_case, radial_topology, to_per_unit
from .planner import Scenario, omega_sweep, optimize
from .powerflow import check_limits, dump_csv, solve
from .reports import dumps_result, format_table, read_design, result_document, sweep_csv

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2, 3
SCENARIOS = {"conductors": "conductors_only", "full": "full"}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; this tool reserves 2 for bad input
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def parse_grid(text: str) -> list[float]:
    """``START:STEP:END`` inclusive, e.g. ``0:0.25:1``."""
    try:
        start, step, end = (Decimal(x) for x in text.split(":"))
    except (ValueError, InvalidOperation):
        raise argparse.ArgumentTypeError(f"bad grid {text!r}, expected START:STEP:END") from None
    if step <= 0 or end < start:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    # decimal arithmetic keeps 0.1-style steps from drifting past END
    out = []
    x = start
    while x <= end:
        out.append(float(x))
        x += step
    return out


def _nonneg_int(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="radplan", description="Radial distribution network planning.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_case(p):
        p.add_argument("case_arg", nargs="?", metavar="CASE", help="case file or builtin:26bus")
        p.add_argument("--case", help="case file or builtin:26bus")
        return p

    def with_swarm(p):
        p.add_argument("--seed", type=_nonneg_int, default=0)
        p.add_argument("--particles", type=int, default=SwarmConfig.n_particles)
        p.add_argument("--iters", type=int, default=SwarmConfig.it_max)
        p.add_argument("--out", default=".", help="output directory")

    with_case(sub.add_parser("validate", help="parse and check a case"))

    pf = with_case(sub.add_parser("pf", help="solve one year for a design"))
    pf.add_argument("--design", help="design or result file (default: conductor type 1 everywhere)")
    pf.add_argument("--year", type=_nonneg_int, default=0)
    pf.add_argument("--out", help="write buses.csv and sections.csv here instead of stdout")

    plan = with_case(sub.add_parser("plan", help="optimize a design"))
    plan.add_argument("--scenario", choices=sorted(SCENARIOS), default="conductors")
    plan.add_argument("--omega", type=float, default=0.5)
    with_swarm(plan)

    sweep = with_case(sub.add_parser("sweep", help="conductor plans over a grid of weights"))
    sweep.add_argument("--omega-grid", type=parse_grid, default=parse_grid("0:0.1:1"))
    with_swarm(sweep)
    return parser


def _case_label(args) -> str:
    if args.case and args.case_arg and args.case != args.case_arg:
        raise _UsageError("give the case either positionally or with --case, not both")
    label = args.case or args.case_arg
    if not label:
        raise _UsageError("no case given")
    return label


def _swarm_config(args) -> SwarmConfig:
    return SwarmConfig(n_particles=args.particles, it_max=args.iters, seed=args.seed)


def _write(directory: str, name: str, text: str) -> None:
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, name), "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _cmd_validate(case, label, args) -> int:
    radial_topology(case)
    print(f"{len(case.buses)} buses, {len(case.sections)} sections, radial: ok")
    return EXIT_OK


def _cmd_pf(case, label, args) -> int:
    design = read_design(args.design) if args.design else Design.uniform(case, 1)
    sol = solve(to_per_unit(case), design, args.year)
    buses, sections = dump_csv(sol)
    if args.out:
        _write(args.out, "buses.csv", buses)
        _write(args.out, "sections.csv", sections)
    else:
        sys.stdout.write(buses + "\n" + sections)
    for v in check_limits(sol, case.economics, args.year):
        print(f"warning: {v.kind} at {v.location}: {v.value:.6g} (limit {v.limit:.6g})", file=sys.stderr)
    print(f"loss {sol.ploss_kw:.6f} kW, {sol.iterations} iterations", file=sys.stderr)
    return EXIT_OK


def _cmd_plan(case, label, args) -> int:
    scenario = Scenario(SCENARIOS[args.scenario], args.omega)
    cfg = _swarm_config(args)
    result = optimize(case, scenario, cfg)
    _write(args.out, "result.json", dumps_result(result_document(result, label, cfg.penalty)))
    _write(args.out, "table.txt", format_table(result, case))
    if result.report is None or not result.report.feasible:
        print("no feasible design found", file=sys.stderr)
        return EXIT_INFEASIBLE
    print(f"objective {result.report.total_objective:.2f}, results in {args.out}")
    return EXIT_OK


def _cmd_sweep(case, label, args) -> int:
    rows = omega_sweep(case, _swarm_config(args), args.omega_grid)
    _write(args.out, "sweep.csv", sweep_csv(rows))
    if not any(r.feasible for r in rows):
        print("no feasible design found", file=sys.stderr)
        return EXIT_INFEASIBLE
    print(f"{len(rows)} weights, results in {args.out}")
    return EXIT_OK


COMMANDS = {"validate": _cmd_validate, "pf": _cmd_pf, "plan": _cmd_plan, "sweep": _cmd_sweep}


def run_cli(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        label = _case_label(args)
        if getattr(args, "particles", 2) < 2 or getattr(args, "iters", 1) < 1:
            raise _UsageError("need --particles >= 2 and --iters >= 1")
        if hasattr(args, "omega") and not 0 <= args.omega <= 1:
            raise _UsageError("--omega must lie in [0, 1]")
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        case = load_case(label)
        return COMMANDS[args.command](case, label, args)
    except OSError as exc:
        print(f"error: cannot read {exc.filename or label}: {exc.strerror}", file=sys.stderr)
        return EXIT_INPUT
    except (CaseError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
