"""Command-line front end.

Three subcommands: ``method-run`` executes a discrete method and writes
run.csv / snapshots.jsonl / report.json; ``ode-run`` integrates the damped
dynamics and writes trajectory.csv / energies_m<i>.csv / events.json /
report.json; ``verify`` runs the named check suite and writes verify.json.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical
failure.  ``LAB_OUT_DIR`` provides the default for ``--out``.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

import numpy as np

from . import diagnostics as diag
from . import methods as M
from . import ode as O
from . import problems as P
from ._artifacts import write_csv, write_json, write_jsonl
from .errors import NumericalError
from .sequences import StepSequence
from .verify import BUDGETS, verify_suite

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

_METHOD_FLAGS = {
    "gd": M.GD,
    "nag-std": M.NAG_STD,
    "nag-3seq": M.NAG_3SEQ,
    "ogm-std": M.OGM_STD,
    "ogm-3seq": M.OGM_3SEQ,
}


class UsageError(ValueError):
    pass


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")], dtype=float)
    except ValueError:
        raise UsageError(f"could not parse vector {text!r} (expected comma-separated floats)")


def _resolve_problem(problem: str, seed: int):
    """Resolve a --problem flag to (label, oracle, default start, info dict)."""
    if problem.startswith("random-quadratic:"):
        try:
            n = int(problem.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad random-quadratic dimension in {problem!r}")
        if n < 1:
            raise UsageError("random-quadratic dimension must be >= 1")
        oracle, x0 = P.random_quadratic(n, seed)
        label = f"{problem}#seed={seed}"
    else:
        try:
            entry = P.get_catalog_entry(problem)
        except KeyError as exc:
            raise UsageError(str(exc))
        oracle, x0, label = entry.oracle, P.default_start(problem), problem
    info = {
        "id": label,
        "dim": oracle.dim,
        "L": oracle.lipschitz,
        "fstar": oracle.fstar,
        "argmin_kind": oracle.argmin_kind,
        "minimizers": [list(map(float, z)) for z in oracle.known_minimizers],
    }
    return label, oracle, x0, info


def _out_dir(args) -> str:
    out = args.out or os.environ.get("LAB_OUT_DIR")
    if not out:
        raise UsageError("no output directory: pass --out or set LAB_OUT_DIR")
    os.makedirs(out, exist_ok=True)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="accellab",
        description="Accelerated-method and damped-dynamics verification lab",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    m = sub.add_parser("method-run", help="run a discrete method and export artifacts")
    m.add_argument("--method", required=True, choices=sorted(_METHOD_FLAGS))
    m.add_argument("--problem", required=True,
                   help="catalog id or random-quadratic:<n>")
    m.add_argument("--seq", default="recursive", choices=["recursive", "linear"])
    m.add_argument("--iters", required=True, type=int)
    m.add_argument("--out", default=None)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--stride", type=int, default=None)

    o = sub.add_parser("ode-run", help="integrate the damped dynamics and export artifacts")
    o.add_argument("--r", required=True, type=float)
    o.add_argument("--problem", required=True)
    o.add_argument("--t0", required=True, type=float)
    o.add_argument("--horizon", required=True, type=float)
    o.add_argument("--x0", required=True, help="comma-separated start point")
    o.add_argument("--v0", default=None, help="comma-separated start velocity (default 0)")
    o.add_argument("--out", default=None)
    o.add_argument("--seed", type=int, default=0)

    v = sub.add_parser("verify", help="run the verification suite")
    v.add_argument("--filter", default=None, help="glob over check ids, e.g. 'nag-*'")
    v.add_argument("--budget", default="quick", choices=sorted(BUDGETS))
    v.add_argument("--out", default=None)
    v.add_argument("--golden", default=None, help="override the packaged golden file")
    return parser


def _method_checks(method, oracle, seq, rec, x0):
    checks = []
    is_nag = method in (M.NAG_STD, M.NAG_3SEQ)
    is_ogm = method in (M.OGM_STD, M.OGM_3SEQ)
    for i in rec.energies:
        chain = rec.energies[i]
        if is_ogm:
            chain = np.concatenate([[rec.energy_base[i]], chain])
        checks.append(diag.monotone_check(chain, 1e-9, check_id=f"energy-monotone/z{i}"))
    if is_nag:
        n = len(rec.gaps) - 1
        t_prev = np.array([seq.value(k - 1) for k in range(1, n + 1)])
        for i, z in enumerate(oracle.known_minimizers):
            base = 0.5 * oracle.lipschitz * float((x0 - z) @ (x0 - z))
            excess = float(np.max(rec.gaps[1:] * t_prev ** 2 - base)) / max(1.0, base)
            checks.append(diag.make_report(f"rate/z{i}", max(0.0, excess), None, 1e-9))
    if is_ogm and rec.min_bracket is not None:
        checks.append(diag.make_report("cocoercivity-bracket", max(0.0, -rec.min_bracket),
                                       None, 1e-12))
    return checks


def cmd_method_run(args) -> int:
    if args.iters < 1:
        raise UsageError("--iters must be >= 1")
    if args.stride is not None and args.stride < 1:
        raise UsageError("--stride must be >= 1")
    method = _METHOD_FLAGS[args.method]
    if method in (M.OGM_STD, M.OGM_3SEQ) and args.seq == "linear":
        raise UsageError("the linear sequence does not satisfy the OGM recursion; use --seq recursive")
    label, oracle, x0, info = _resolve_problem(args.problem, args.seed)
    out = _out_dir(args)

    seq = None
    if method != M.GD:
        kind = {"recursive": "nag_recursive", "linear": "nag_linear"}[args.seq]
        if method in (M.OGM_STD, M.OGM_3SEQ):
            kind = "ogm_recursive"
        seq = StepSequence(kind)

    params = {
        "method": args.method,
        "problem": args.problem,
        "seq": args.seq if method != M.GD else None,
        "iters": args.iters,
        "seed": args.seed,
        "stride": args.stride,
    }
    report = {"command": "method-run", "params": params, "problem": info}
    try:
        rec = M.run_method(method, oracle, seq, args.iters,
                           snapshot_stride=args.stride, x0=x0)
    except NumericalError as err:
        report.update({"checks": [], "passed": False,
                       "failure": {"message": str(err), "at": err.at}})
        write_json(os.path.join(out, "report.json"), report)
        print(f"numerical failure at iteration {err.at}: {err}", file=sys.stderr)
        return EXIT_NUMERICAL

    header = ["k", "gap", "grad_norm"] + [f"E_m{i}" for i in rec.energies]
    rows = (
        [k, rec.gaps[k], rec.grad_norms[k]] + [rec.energies[i][k] for i in rec.energies]
        for k in range(args.iters + 1)
    )
    write_csv(os.path.join(out, "run.csv"), header, rows)
    write_jsonl(os.path.join(out, "snapshots.jsonl"),
                ({"k": int(k), "x": x} for k, x in rec.snapshots))

    checks = _method_checks(method, oracle, seq, rec, x0)
    report.update({
        "terminal": {"gap": float(rec.gaps[-1]), "grad_norm": float(rec.grad_norms[-1])},
        "checks": [c.to_dict() for c in checks],
        "passed": all(c.passed for c in checks),
        "failure": None,
    })
    write_json(os.path.join(out, "report.json"), report)
    return EXIT_OK


def _ode_checks(r, t0, v0, oracle, traj, recs, is_counterexample):
    checks = []
    for j in range(len(recs)):
        E = np.array([rec.e_z for rec in recs[j]])
        checks.append(diag.monotone_check(E, 1e-8, check_id=f"energy-monotone/z{j}"))
        if 1.0 < r < 3.0:
            F = np.array([rec.f_z for rec in recs[j]])
            checks.append(diag.monotone_check(F, 1e-8, check_id=f"energy-F-monotone/z{j}"))
            gaps = np.array([oracle.gap(x) for x in traj.xs])
            excess = float(np.max(gaps - F[0] / traj.ts ** (2.0 * r / 3.0)))
            checks.append(diag.make_report(f"rate/z{j}", max(0.0, excess), None, 1e-8))
        if r == 3.0 and t0 == 0.0 and not np.any(v0):
            z = oracle.known_minimizers[j]
            dist = float(np.max(np.linalg.norm(traj.xs - z, axis=1)))
            bound = 0.5 * math.sqrt(2.0 * E[0])
            checks.append(diag.make_report(f"trajectory-bound/z{j}",
                                           max(0.0, dist - bound), None, 1e-6))
            mask = traj.ts > 0
            excess = float(np.max(np.array([oracle.gap(x) for x in traj.xs[mask]])
                                  - E[0] / traj.ts[mask] ** 2))
            checks.append(diag.make_report(f"rate/z{j}", max(0.0, excess), None, 1e-8))
    if is_counterexample:
        checks.append(O.sturm_excursion_check(traj, r))
        osc = O.oscillator_energy(traj, oracle)
        checks.append(diag.monotone_check(osc, 1e-8, check_id="oscillator-energy-monotone"))
    return checks


def cmd_ode_run(args) -> int:
    if args.r <= 0:
        raise UsageError("--r must be positive")
    label, oracle, _, info = _resolve_problem(args.problem, args.seed)
    x0 = _parse_vector(args.x0)
    v0 = _parse_vector(args.v0) if args.v0 else np.zeros(oracle.dim)
    out = _out_dir(args)
    try:
        cfg = O.OdeConfig(r=args.r, t0=args.t0, x0=x0, v0=v0, horizon=args.horizon)
    except ValueError as exc:
        raise UsageError(str(exc))
    if cfg.x0.shape != (oracle.dim,):
        raise UsageError(f"--x0 must have dimension {oracle.dim}")

    is_ce = args.problem == "counterexample"
    z_list = list(oracle.known_minimizers)
    params = {
        "r": args.r, "problem": args.problem, "t0": args.t0, "horizon": args.horizon,
        "x0": [float(v) for v in cfg.x0], "v0": [float(v) for v in cfg.v0],
    }
    report = {"command": "ode-run", "params": params, "problem": info}
    try:
        traj, recs = O.integrate(oracle, cfg, z_list, detect_unit_events=is_ce)
    except NumericalError as err:
        report.update({"checks": [], "passed": False,
                       "failure": {"message": str(err), "at": err.at}})
        write_json(os.path.join(out, "report.json"), report)
        print(f"numerical failure at t = {err.at}: {err}", file=sys.stderr)
        return EXIT_NUMERICAL

    n = oracle.dim
    header = ["t"] + [f"x_{i}" for i in range(n)] + [f"v_{i}" for i in range(n)]
    rows = ([traj.ts[i]] + list(traj.xs[i]) + list(traj.vs[i]) for i in range(len(traj.ts)))
    write_csv(os.path.join(out, "trajectory.csv"), header, rows)
    for j in range(len(recs)):
        write_csv(
            os.path.join(out, f"energies_m{j}.csv"),
            ["t", "e_z", "f_z", "osc"],
            ([rec.t, rec.e_z, rec.f_z, rec.osc] for rec in recs[j]),
        )
    write_json(os.path.join(out, "events.json"),
               [{"t": ev.t, "kind": ev.kind, "velocity": ev.velocity} for ev in traj.events])

    checks = _ode_checks(args.r, args.t0, cfg.v0, oracle, traj, recs, is_ce)
    stats = traj.step_stats
    report.update({
        "step_stats": {
            "accepted": stats.accepted,
            "rejected": stats.rejected,
            "min_step": stats.min_step if stats.accepted else None,
            "max_step": stats.max_step if stats.accepted else None,
        },
        "events": len(traj.events),
        "checks": [c.to_dict() for c in checks],
        "passed": all(c.passed for c in checks),
        "failure": None,
    })
    write_json(os.path.join(out, "report.json"), report)
    return EXIT_OK


def cmd_verify(args) -> int:
    out = _out_dir(args)
    started = time.perf_counter()
    reports, passed = verify_suite(budget=args.budget, filter_glob=args.filter,
                                   golden_path=args.golden)
    elapsed = time.perf_counter() - started
    body = {
        "budget": args.budget,
        "filter": args.filter,
        "checks": [r.to_dict() for r in reports],
        "counts": {
            "passed": sum(1 for r in reports if r.passed),
            "failed": sum(1 for r in reports if not r.passed),
        },
        "passed": passed,
    }
    write_json(os.path.join(out, "verify.json"), body)
    failed = [r.check_id for r in reports if not r.passed]
    print(f"{body['counts']['passed']} passed, {body['counts']['failed']} failed "
          f"({elapsed:.1f}s, budget {args.budget})")
    if failed:
        print("failing checks: " + ", ".join(failed), file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        if args.command == "method-run":
            return cmd_method_run(args)
        if args.command == "ode-run":
            return cmd_ode_run(args)
        return cmd_verify(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
