"""Command-line front end.

Subcommands: ``solve`` (one case, optionally multi-period / storage),
``diffcheck`` (finite-difference validation of the derivative callbacks),
``bench`` (a batch of cases with shifted-geometric-mean summaries), and
``inspect`` (model dimensions and block inventory).

``--case`` accepts a MATPOWER file path or the builtin ``lv:N`` synthetic
problem.  Exit codes: 0 success, 2 parse/validation error, 3 solver or
derivative-check failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import derivcheck
from .autodiff import compress_coordinates, hessian_structure, jacobian_structure
from .bench import RunRecord, summarize_runs
from .core import ModelError, extract_solution
from .matpower import CaseError, parse_case_file
from .opf import mpopf_model, mpopf_model_series, opf_model, storage_complementarity_violation
from .problems import luksan_vlcek_model
from .solution import write_solution
from .solver import SolverOptions, Timings, bound_violation, constraint_violation, solve

GRAD_TOL = 1e-6
JAC_TOL = 1e-6
HESS_TOL = 1e-5


def _build_case_model(args) -> tuple:
    """(model, vars, cons, label, periods) for a --case argument."""
    spec = args.case
    if spec.startswith("lv:"):
        n = int(spec.split(":", 1)[1])
        model, vars_ns, cons_ns = luksan_vlcek_model(n)
        return model, vars_ns, cons_ns, spec, 1

    t0 = time.perf_counter()
    case = parse_case_file(spec)
    parse_seconds = time.perf_counter() - t0
    form = getattr(args, "form", "polar")
    if getattr(args, "periods", False):
        curve = getattr(args, "curve", None)
        pd_path = getattr(args, "pd", None)
        qd_path = getattr(args, "qd", None)
        kwargs = dict(
            corrective_action_ratio=args.car,
            storage_complementarity_constraint=not getattr(args, "relax_complementarity", False),
            form=form,
        )
        if curve is not None:
            values = [float(v) for v in curve.split(",") if v.strip()]
            model, vars_ns, cons_ns = mpopf_model(case, values, **kwargs)
            periods = len(values)
        elif pd_path is not None and qd_path is not None:
            model, vars_ns, cons_ns = mpopf_model_series(case, pd_path, qd_path, **kwargs)
            periods = vars_ns.pg.shape[1] if len(vars_ns.pg.shape) > 1 else 1
        else:
            raise ModelError("--periods needs --curve or both --pd and --qd")
    else:
        model, vars_ns, cons_ns = opf_model(case, form=form)
        periods = 1
    model.build_seconds += parse_seconds
    return model, vars_ns, cons_ns, Path(spec).name, periods


def _named_blocks(vars_ns) -> dict:
    return {name: blk for name, blk in vars(vars_ns).items()}


def _print(args, human: str, payload: dict) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(human)


# ----------------------------------------------------------------------
# solve
# ----------------------------------------------------------------------


def cmd_solve(args) -> int:
    try:
        model, vars_ns, cons_ns, label, periods = _build_case_model(args)
    except (CaseError, ModelError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2

    opts = SolverOptions(tol=args.tol, max_wall_seconds=args.time_limit)
    t0 = time.perf_counter()
    result = solve(model, opts)
    wall = time.perf_counter() - t0

    cvio = constraint_violation(model, result.x)
    bvio = bound_violation(model, result.x)
    has_storage = hasattr(vars_ns, "pc")
    compl = storage_complementarity_violation(result.x, vars_ns) if has_storage else None

    tm = result.timings
    payload = {
        "case": label,
        "form": getattr(args, "form", "polar"),
        "periods": periods,
        "tol": args.tol,
        "status": result.status,
        "objective": result.objective,
        "iterations": result.iterations,
        "constraint_violation": cvio,
        "bound_violation": bvio,
        "complementarity_violation": compl,
        "wall_seconds": wall,
        "timings": {
            "build_seconds": tm.build_seconds,
            "init_seconds": tm.init_seconds,
            "ad_seconds": tm.ad_seconds,
            "linsolve_seconds": tm.linsolve_seconds,
            "internal_seconds": tm.internal_seconds,
        },
    }
    lines = [
        f"case: {label}  form: {payload['form']}  T: {periods}",
        f"status: {result.status}  iterations: {result.iterations}",
        f"objective: {result.objective:.8e}",
        f"constraint violation: {cvio:.3e}  bound violation: {bvio:.3e}",
    ]
    if compl is not None:
        lines.append(f"complementarity violation: {compl!r}")
    lines.append(
        "timings: build=%.3fs init=%.3fs ad=%.3fs linsolve=%.3fs internal=%.3fs"
        % (tm.build_seconds, tm.init_seconds, tm.ad_seconds, tm.linsolve_seconds, tm.internal_seconds)
    )
    _print(args, "\n".join(lines), payload)

    if args.out:
        blocks = {
            name: extract_solution(result.x, blk) for name, blk in _named_blocks(vars_ns).items()
        }
        meta = {"case": label, "status": result.status, "objective": repr(result.objective)}
        if compl is not None:
            meta["complementarity_violation"] = repr(compl)
        write_solution(args.out, blocks, meta)

    return 0 if result.status == "optimal" else 3


# ----------------------------------------------------------------------
# diffcheck
# ----------------------------------------------------------------------


def cmd_diffcheck(args) -> int:
    try:
        model, _, _, label, _ = _build_case_model(args)
    except (CaseError, ModelError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2

    restore = None
    if args.corrupt_derivative:
        # test-only negative control: perturb one Jacobian slot
        real = derivcheck.eval_jacobian

        def corrupted(mdl, x, out):
            real(mdl, x, out)
            if out.size:
                out[0] += 1.0

        derivcheck.eval_jacobian = corrupted
        restore = real
    try:
        report = derivcheck.check_derivatives(model, points=args.points, seed=args.seed)
    finally:
        if restore is not None:
            derivcheck.eval_jacobian = restore

    ok = (
        report.grad_err <= GRAD_TOL
        and report.jac_err <= JAC_TOL
        and report.hess_err <= HESS_TOL
    )
    payload = {
        "case": label,
        "points": args.points,
        "seed": args.seed,
        "gradient_rel_err": report.grad_err,
        "gradient_worst_coord": list(report.grad_coord),
        "jacobian_rel_err": report.jac_err,
        "jacobian_worst_coord": list(report.jac_coord),
        "hessian_rel_err": report.hess_err,
        "hessian_worst_coord": list(report.hess_coord),
        "pass": ok,
    }
    human = "\n".join(
        [
            f"case: {label}  points: {args.points}  seed: {args.seed}",
            f"gradient: max rel err {report.grad_err:.3e} at {report.grad_coord} "
            f"(tol {GRAD_TOL:g})",
            f"jacobian: max rel err {report.jac_err:.3e} at {report.jac_coord} "
            f"(tol {JAC_TOL:g})",
            f"hessian:  max rel err {report.hess_err:.3e} at {report.hess_coord} "
            f"(tol {HESS_TOL:g})",
            "result: PASS" if ok else "result: FAIL",
        ]
    )
    _print(args, human, payload)
    return 0 if ok else 3


# ----------------------------------------------------------------------
# bench
# ----------------------------------------------------------------------


def cmd_bench(args) -> int:
    records: list[RunRecord] = []
    for spec in args.cases:
        ns = argparse.Namespace(case=spec, form=args.form, periods=False, car=0.25)
        try:
            model, vars_ns, _, label, periods = _build_case_model(ns)
        except (CaseError, ModelError, OSError, ValueError) as err:
            records.append(
                RunRecord(
                    case=spec, form=args.form, periods=1, tol=args.tol,
                    status="build_error", objective=float("nan"), iterations=0,
                    wall_seconds=args.time_limit, constraint_violation=float("nan"),
                    complementarity_violation=None, timings=Timings(),
                )
            )
            print(f"error building {spec}: {err}", file=sys.stderr)
            continue
        t0 = time.perf_counter()
        result = solve(model, SolverOptions(tol=args.tol, max_wall_seconds=args.time_limit))
        wall = time.perf_counter() - t0
        compl = (
            storage_complementarity_violation(result.x, vars_ns)
            if hasattr(vars_ns, "pc")
            else None
        )
        records.append(
            RunRecord(
                case=label,
                form=args.form,
                periods=periods,
                tol=args.tol,
                status=result.status,
                objective=result.objective,
                iterations=result.iterations,
                wall_seconds=wall,
                constraint_violation=constraint_violation(model, result.x),
                complementarity_violation=compl,
                timings=result.timings,
            )
        )

    summary = summarize_runs(records, time_limit=args.time_limit, shift=args.shift)
    if args.json:
        print(
            json.dumps(
                {"records": [r.to_dict() for r in records], "summary": summary},
                indent=2,
                sort_keys=True,
            )
        )
    else:
        for rec in records:
            print(rec.to_line())
        sgm_t = summary["sgm_time"]
        sgm_v = summary["sgm_constraint_violation"]
        print(
            f"summary: solved {summary['solved']}/{summary['total']}  "
            f"sgm{args.shift:g}_time={'-' if sgm_t is None else f'{sgm_t:.4f}'}  "
            f"sgm{args.shift:g}_cvio={'-' if sgm_v is None else f'{sgm_v:.3e}'}"
        )
    return 0


# ----------------------------------------------------------------------
# inspect
# ----------------------------------------------------------------------


def cmd_inspect(args) -> int:
    try:
        model, vars_ns, cons_ns, label, periods = _build_case_model(args)
    except (CaseError, ModelError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2

    jr, jc = jacobian_structure(model)
    hr, hc = hessian_structure(model)
    jpat = compress_coordinates(jr, jc)
    hpat = compress_coordinates(hr, hc)

    var_inventory = [
        {"name": name, "shape": list(blk.shape), "offset": blk.offset}
        for name, blk in _named_blocks(vars_ns).items()
    ]
    con_inventory = [
        {"name": name, "rows": blk.nrows, "offset": blk.row_offset}
        for name, blk in vars(cons_ns).items()
    ]
    payload = {
        "case": label,
        "periods": periods,
        "nvar": model.nvar,
        "ncon": model.ncon,
        "jacobian_slots": int(jr.shape[0]),
        "jacobian_nnz_compressed": jpat.nnz,
        "hessian_slots": int(hr.shape[0]),
        "hessian_nnz_compressed": hpat.nnz,
        "variable_blocks": var_inventory,
        "constraint_blocks": con_inventory,
    }
    lines = [
        f"case: {label}  T: {periods}",
        f"nvar: {model.nvar}  ncon: {model.ncon}",
        f"jacobian slots: {jr.shape[0]} raw, {jpat.nnz} compressed",
        f"hessian slots:  {hr.shape[0]} raw, {hpat.nnz} compressed",
        "variable blocks:",
    ]
    for item in var_inventory:
        lines.append(f"  {item['name']:>6} shape={tuple(item['shape'])} offset={item['offset']}")
    lines.append("constraint blocks:")
    for item in con_inventory:
        lines.append(f"  {item['name']:>28} rows={item['rows']} offset={item['offset']}")
    _print(args, "\n".join(lines), payload)
    return 0


# ----------------------------------------------------------------------
# argument wiring
# ----------------------------------------------------------------------


def _add_case_args(p: argparse.ArgumentParser, with_mp: bool = True) -> None:
    p.add_argument("--case", required=True, help="MATPOWER .m path or builtin lv:N")
    p.add_argument("--form", choices=("polar", "rect"), default="polar")
    if with_mp:
        p.add_argument("--periods", action="store_true", help="build a multi-period model")
        p.add_argument("--curve", help="comma-separated demand scaling curve")
        p.add_argument("--pd", help="active load series file (MW, periods x buses)")
        p.add_argument("--qd", help="reactive load series file (MVAr, periods x buses)")
        p.add_argument("--car", type=float, default=0.25, help="corrective action ratio")
        p.add_argument(
            "--relax-complementarity",
            action="store_true",
            help="drop storage pc*pd=0 rows; the violation is reported post-solve",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simdnlp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one case")
    _add_case_args(p)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--out", help="write the solution to this path")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("diffcheck", help="finite-difference derivative validation")
    _add_case_args(p, with_mp=False)
    p.add_argument("--points", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--corrupt-derivative", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_diffcheck)

    p = sub.add_parser("bench", help="solve a batch of cases and summarize")
    p.add_argument("--cases", nargs="+", required=True)
    p.add_argument("--form", choices=("polar", "rect"), default="polar")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--time-limit", type=float, default=900.0)
    p.add_argument("--shift", type=float, default=10.0)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("inspect", help="print model dimensions and block inventory")
    _add_case_args(p)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_inspect)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
