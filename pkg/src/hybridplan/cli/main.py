"""``hybridplan`` command line.

Exit codes: 0 success, 2 infeasible, 3 input error, 4 verification failure.
"""

from __future__ import annotations

import argparse
import sys

from .. import oracle, scenario_io
from ..formulation import DecodeError, ScenarioInvalid, assemble
from ..milp import ModelError, ModelFormatError, SolveOptions, export_model, solve_model_file
from .commands import (PARAMETERS, PlanInfeasible, PlanOptions, cmd_baseline, cmd_plan,
                       cmd_sweep, cmd_verify, parse_range, parse_values)

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_INPUT = 3
EXIT_VERIFY = 4


class VerificationFailed(RuntimeError):
    pass


def format_plan(result) -> str:
    c = result.cost_breakdown
    lines = ["feeder types:"]
    lines += [f"  {k}: {v}" for k, v in result.feeder_types.items()]
    lines.append("placements:")
    for u, p in result.placements.items():
        where = p.feeder or "-"
        lines.append(f"  {u:<8} {p.kind:<13} {p.native_bus} bus  feeder {where:<6} "
                     f"{p.capacity:.6g} MW")
    lines.append("costs:")
    for name in ("investment", "operation", "reliability", "total"):
        lines.append(f"  {name:<12} {getattr(c, name)!r}")
    s = result.solver_stats
    lines.append(f"solver: {s.status}, gap {s.gap:.3g}, {s.nodes} nodes")
    lines.append(f"wall_time: {s.wall_time:.3f} s")
    return "\n".join(lines)


def format_sweep(report) -> str:
    header = f"{report.parameter:>14} {'investment':>16} {'operation':>16} {'reliability':>14} " \
             f"{'total':>16} {'dc_feeders':>10}  status"
    lines = [header]
    for r in report.rows:
        if r.plan is None:
            lines.append(f"{r.value:>14.6g} {'':>16} {'':>16} {'':>14} {'':>16} {'':>10}  "
                         f"{r.status}")
            continue
        c = r.plan.cost_breakdown
        lines.append(f"{r.value:>14.6g} {c.investment:>16.2f} {c.operation:>16.2f} "
                     f"{c.reliability:>14.2f} {c.total:>16.2f} {r.plan.dc_feeder_count:>10d}  "
                     f"{r.status}")
    return "\n".join(lines + report.summary())


def _options(args) -> PlanOptions:
    return PlanOptions(gap=args.gap, time_limit=args.time_limit, node_limit=args.node_limit,
                       seed=args.seed, backend=args.backend)


def _run_plan(args):
    result = cmd_plan(args.scenario, _options(args), args.out, args.format)
    print(format_plan(result))


def _run_baseline(args):
    report = cmd_baseline(args.scenario, _options(args))
    print(f"grid energy:   {report.energy!r}")
    print(f"fixed charges: {report.fixed!r}")
    print(f"baseline cost: {report.baseline!r}")
    if report.plan_total is not None:
        print(f"plan total:    {report.plan_total!r}")
    print(report.verdict)


def _run_sweep(args):
    values = parse_values(args.values) if args.values is not None else parse_range(args.range)
    report = cmd_sweep(args.scenario, args.parameter, values, _options(args), args.out,
                       args.format, args.workers)
    print(format_sweep(report))


def _run_verify(args):
    report = cmd_verify(args.scenario, _options(args))
    print(f"oracle objective: {report.best_objective!r}")
    print(f"assignments evaluated: {report.evaluated_count}")
    print(f"discrepancy: {report.discrepancy!r}")
    print(f"agreement: {'yes' if report.agreement else 'no'}")
    if not report.agreement:
        raise VerificationFailed("solver and oracle disagree")


def _run_export(args):
    pm = assemble(scenario_io.load_scenario(args.scenario))
    export_model(pm.model, args.model)
    m = pm.model
    print(f"wrote {args.model}: {m.num_vars} variables ({m.num_binaries} binary), "
          f"{m.num_rows} rows")


def _run_solve_model(args):
    opts = SolveOptions(relative_gap=args.gap, node_limit=args.node_limit,
                        time_limit=args.time_limit, deterministic_seed=args.seed)
    sol = solve_model_file(args.model, args.backend, opts)
    print(f"status: {sol.status}")
    print(f"objective: {sol.objective!r}")
    print(f"best bound: {sol.best_bound!r}")
    if sol.values is None:
        raise PlanInfeasible(sol.status)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gap", type=float, default=1e-6, help="relative optimality gap")
    common.add_argument("--time-limit", type=float, default=None, help="seconds per solve")
    common.add_argument("--node-limit", type=int, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--backend", choices=("native", "highs"), default="native")

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--out", default=None, help="result path (a directory for --format csv)")
    output.add_argument("--format", choices=scenario_io.FORMATS, default="machine")

    parser = argparse.ArgumentParser(prog="hybridplan",
                                     description="Hybrid ac/dc microgrid planning.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", parents=[common, output], help="plan one scenario")
    p.add_argument("scenario")
    p.set_defaults(run=_run_plan)

    p = sub.add_parser("baseline", parents=[common], help="grid-only cost and verdict")
    p.add_argument("scenario")
    p.set_defaults(run=_run_baseline)

    p = sub.add_parser("sweep", parents=[common, output], help="sensitivity sweep")
    p.add_argument("scenario")
    p.add_argument("parameter", choices=PARAMETERS)
    grid = p.add_mutually_exclusive_group(required=True)
    grid.add_argument("--values", help="comma separated values, e.g. 0,0.5,1")
    grid.add_argument("--range", help="lo:hi:step, inclusive of hi")
    p.add_argument("--workers", type=int, default=1, help="parallel solves")
    p.set_defaults(run=_run_sweep)

    p = sub.add_parser("verify", parents=[common], help="check the solver against enumeration")
    p.add_argument("scenario")
    p.set_defaults(run=_run_verify)

    p = sub.add_parser("export-model", help="write the scenario's MILP in text format")
    p.add_argument("scenario")
    p.add_argument("model")
    p.set_defaults(run=_run_export)

    p = sub.add_parser("solve-model", parents=[common], help="solve a text-format model")
    p.add_argument("model")
    p.set_defaults(run=_run_solve_model)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, which would read as "infeasible"
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    try:
        args.run(args)
    except PlanInfeasible as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except VerificationFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (scenario_io.ScenarioError, ScenarioInvalid, oracle.OracleSizeError,
            ModelFormatError, ModelError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
