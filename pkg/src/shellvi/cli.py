"""Command-line interface.

Verbs: ``run <config>``, ``sweep <config> --param ... --values ...``,
``validate-chart <config>`` and ``dump-qp <config>``.  Exit status: 0 on
success, 2 when a solve did not converge (results are still written), 1 on
configuration or pipeline errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .config import parse_config_file
from .errors import ShellviError
from .geometry import validate_chart
from .pipeline import chart_from_config, dump_problem, run, sweep


def _add_common(parser):
    parser.add_argument("config", help="path to a run configuration file")
    parser.add_argument("--solver", choices=("psor", "activeset"), help="override solver.method")
    parser.add_argument("--tol", type=float, help="override solver.tol")
    parser.add_argument(
        "--no-timestamp",
        action="store_true",
        help="suppress timestamp lines for byte-identical reruns",
    )
    parser.add_argument("--output-dir", help="override output.dir")


def _load_config(args):
    config = parse_config_file(args.config)
    overrides = {}
    if getattr(args, "solver", None):
        overrides["solver"] = args.solver
    if getattr(args, "tol", None) is not None:
        overrides["tol"] = args.tol
    if getattr(args, "no_timestamp", False):
        overrides["timestamp"] = False
    if getattr(args, "output_dir", None):
        overrides["output_dir"] = args.output_dir
    return dataclasses.replace(config, **overrides).validate() if overrides else config


def _cmd_run(args) -> int:
    bundle = run(_load_config(args))
    report = bundle.report
    print(
        f"{bundle.kind} solve [{report.method}]: converged={report.converged} "
        f"iterations={report.iterations} energy={report.energy:.6e} "
        f"residual={report.complementarity_residual:.3e} "
        f"active={len(report.active_set)}/{len(bundle.qp.constrained)}"
    )
    if bundle.kind == "flexural":
        print(f"penalty energy share: {bundle.penalty_share:.3e}")
    for name, path in bundle.files.items():
        print(f"wrote {name}: {path}")
    return 0 if report.converged else 2


def _cmd_sweep(args) -> int:
    config = _load_config(args)
    rows, _, path = sweep(config, args.param, args.values)
    print(f"sweep over {args.param}: {len(args.values)} runs")
    for k, value in enumerate(rows["value"]):
        err = rows["error"][k]
        status = f"error: {err}" if err else (
            f"energy={rows['energy'][k]:.6e} active={rows['active_set_size'][k]} "
            f"residual={rows['residual'][k]:.3e} converged={bool(rows['converged'][k])}"
        )
        print(f"  {args.param}={value}: {status}")
    if path:
        print(f"wrote table: {path}")
    return 0 if all(not e for e in rows["error"]) and all(rows["converged"]) else 2


def _cmd_validate_chart(args) -> int:
    config = _load_config(args)
    chart = chart_from_config(config)
    report = validate_chart(chart, samples=args.samples, tol=args.chart_tol)
    print(report.summary())
    return 0 if report.ok else 1


def _cmd_dump_qp(args) -> int:
    files = dump_problem(_load_config(args))
    for name, path in files.items():
        print(f"wrote {name}: {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shellvi",
        description="Obstacle problems for elastic membrane and flexural shells",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one configured solve")
    _add_common(p_run)
    p_run.set_defaults(fn=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a parameter study")
    _add_common(p_sweep)
    p_sweep.add_argument("--param", choices=("eps", "mesh"), required=True)
    p_sweep.add_argument("--values", type=float, nargs="+", required=True)
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_val = sub.add_parser("validate-chart", help="finite-difference chart validation")
    _add_common(p_val)
    p_val.add_argument("--samples", type=int, default=10, help="grid resolution per axis")
    p_val.add_argument(
        "--chart-tol", type=float, default=1e-6, help="derivative discrepancy threshold"
    )
    p_val.set_defaults(fn=_cmd_validate_chart)

    p_dump = sub.add_parser("dump-qp", help="dump the assembled matrix and load vector")
    _add_common(p_dump)
    p_dump.set_defaults(fn=_cmd_dump_qp)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ShellviError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
