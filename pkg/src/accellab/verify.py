"""The verification suite: every module invariant as a named, budgeted check.

``verify_suite`` runs (a filterable subset of) the checks at a ``quick`` or
``full`` budget, prints one line per check, and returns the reports plus an
overall pass flag.  Golden values come from :mod:`accellab.golden`.
"""

from __future__ import annotations

import fnmatch
import math

import numpy as np

from . import diagnostics as diag
from . import methods as M
from . import ode as O
from . import problems as P
from .golden import load_golden
from .sequences import StepSequence

BUDGETS = {
    "quick": dict(
        random_pairs=200, fd_points=30,
        method_iters=2000, n_random=6, rate_iters=2000,
        equiv_steps=200, equiv_oracles=4, pair_iters=300,
        r3_horizon=30.0, sub3_horizon=30.0, sub3_rs=(1.5, 2.0, 2.5),
        ce_horizon=80.0, tail_iters=10_000, toeplitz_iters=10_000,
        pg3_horizon=30.0, pg2_horizon=300.0,
    ),
    "full": dict(
        random_pairs=1000, fd_points=100,
        method_iters=10_000, n_random=20, rate_iters=10_000,
        equiv_steps=500, equiv_oracles=10, pair_iters=1000,
        r3_horizon=100.0, sub3_horizon=100.0, sub3_rs=(1.5, 2.0, 2.5),
        ce_horizon=200.0, tail_iters=100_000, toeplitz_iters=100_000,
        pg3_horizon=100.0, pg2_horizon=1000.0,
    ),
}

_RANDOM_DIMS = (2, 10, 50)


class VerifyContext:
    """Budget parameters, golden values, and memoized expensive runs."""

    def __init__(self, budget: str, golden: dict):
        self.budget = budget
        self.p = BUDGETS[budget]
        self.golden = golden[budget]
        self._cache = {}

    def memo(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def catalog(self):
        return self.memo("catalog", P.built_in_catalog)

    def method_instances(self):
        """Catalog problems plus seeded random quadratics (label, oracle, x0)."""

        def build():
            items = [(e.id, e.oracle, P.default_start(e.id)) for e in self.catalog()]
            for s in range(self.p["n_random"]):
                oracle, x0 = P.random_quadratic(_RANDOM_DIMS[s % 3], seed=s)
                items.append((f"random-quadratic:{_RANDOM_DIMS[s % 3]}#{s}", oracle, x0))
            return items

        return self.memo("instances", build)

    def method_record(self, label, oracle, x0, method, seq_kind, iters):
        def build():
            seq = StepSequence(seq_kind) if method != M.GD else None
            return M.run_method(method, oracle, seq, iters, x0=x0)

        return self.memo(("run", label, method, seq_kind, iters), build)

    def ode_run(self, pid, r, t0, horizon):
        def build():
            entry = P.get_catalog_entry(pid)
            cfg = O.OdeConfig(r=r, t0=t0, x0=P.default_start(pid),
                              v0=np.zeros(entry.oracle.dim), horizon=horizon)
            traj, recs = O.integrate(entry.oracle, cfg, list(entry.oracle.known_minimizers))
            return entry.oracle, traj, recs

        return self.memo(("ode", pid, r, t0, horizon), build)

    def ce_run(self):
        return self.memo("ce", lambda: O.run_counterexample(1.0, 1.0, self.p["ce_horizon"]))

    def tail_record(self, method, seq_kind):
        def build():
            entry = P.get_catalog_entry("segment2d")
            return M.run_method(method, entry.oracle, StepSequence(seq_kind),
                                self.p["tail_iters"], x0=P.default_start("segment2d"),
                                record_energies=False)

        return self.memo(("tail", method), build)


def _report(check_id, violation, at, tol, notes=""):
    # report `at` as an index or time; instance labels belong in the notes
    if at is not None and not isinstance(at, (int, float, np.integer, np.floating)):
        notes = (notes + "; " if notes else "") + f"worst at {at}"
        at = None
    return diag.make_report(check_id, violation, at, tol, notes)


# ---------------------------------------------------------------------------
# problem-suite checks

def check_problem_convexity(ctx):
    rng = np.random.default_rng(101)
    worst, where = 0.0, None
    for entry in ctx.catalog():
        o = entry.oracle
        for _ in range(ctx.p["random_pairs"]):
            x = rng.uniform(-10, 10, o.dim)
            y = rng.uniform(-10, 10, o.dim)
            slack = P.check_convexity_inequality(o, x, y)
            if -slack > worst:
                worst, where = -slack, entry.id
    return [_report("problem-convexity", worst, where, 1e-10)]


def check_problem_cocoercivity(ctx):
    rng = np.random.default_rng(102)
    worst, where = 0.0, None
    for entry in ctx.catalog():
        o = entry.oracle
        for _ in range(ctx.p["random_pairs"]):
            x = rng.uniform(-10, 10, o.dim)
            y = rng.uniform(-10, 10, o.dim)
            slack = P.check_cocoercivity(o, x, y)
            if -slack > worst:
                worst, where = -slack, entry.id
    return [_report("problem-cocoercivity", worst, where, 1e-10)]


def _away_from_seams(entry_id, x, margin):
    if entry_id in ("counterexample", "segment2d"):
        return abs(abs(x[0]) - 1.0) > margin
    return True


def check_problem_gradient_fd(ctx):
    rng = np.random.default_rng(103)
    h = 1e-5
    worst, where = 0.0, None
    for entry in ctx.catalog():
        o = entry.oracle
        done = 0
        while done < ctx.p["fd_points"]:
            x = rng.uniform(-10, 10, o.dim)
            if not _away_from_seams(entry.id, x, 10 * h):
                continue
            err = P.check_gradient_fd(o, x, h)
            if err > worst:
                worst, where = err, entry.id
            done += 1
    return [_report("problem-gradient-fd", worst, where, 1e-6)]


def check_problem_grad_lipschitz_1d(ctx):
    rng = np.random.default_rng(104)
    o = P.make_counterexample_1d()
    worst = 0.0
    for _ in range(ctx.p["random_pairs"]):
        x, y = rng.uniform(-10, 10, 2)
        gx = float(o.gradient([x])[0])
        gy = float(o.gradient([y])[0])
        worst = max(worst, abs(gx - gy) - abs(x - y))
    return [_report("problem-grad-lipschitz-1d", worst, None, 1e-12)]


# ---------------------------------------------------------------------------
# sequence and method checks

def check_seq_growth(ctx):
    worst, where = -math.inf, None
    for kind in ("nag_recursive", "nag_linear", "ogm_recursive"):
        seq = StepSequence(kind)
        for k in range(ctx.p["method_iters"] + 1):
            excess = seq.value(k) - (k + 1.0)
            if excess > worst:
                worst, where = excess, f"{kind}@{k}"
    return [_report("seq-growth", max(0.0, worst), where, 1e-12)]


def _energy_chain(rec, i):
    if rec.method in (M.OGM_STD, M.OGM_3SEQ):
        return np.concatenate([[rec.energy_base[i]], rec.energies[i]])
    return rec.energies[i]


def _monotone_reports(ctx, check_id, methods, seq_kinds):
    reports = []
    worst, where, tol_used = 0.0, None, 1e-9
    for label, oracle, x0 in ctx.method_instances():
        for method in methods:
            for kind in seq_kinds:
                rec = ctx.method_record(label, oracle, x0, method, kind, ctx.p["method_iters"])
                for i in rec.energies:
                    chain = _energy_chain(rec, i)
                    rep = diag.monotone_check(chain, 1e-9)
                    scaled = rep.max_violation / max(1.0, abs(chain[0]))
                    if scaled > worst:
                        worst, where = scaled, f"{label}/{method}/{kind}/z{i}"
    reports.append(_report(check_id, worst, where, tol_used))
    return reports


def check_nag_energy_monotone(ctx):
    return _monotone_reports(ctx, "nag-energy-monotone", (M.NAG_3SEQ, M.NAG_STD),
                             ("nag_recursive", "nag_linear"))


def check_ogm_energy_monotone(ctx):
    return _monotone_reports(ctx, "ogm-energy-monotone", (M.OGM_3SEQ, M.OGM_STD),
                             ("ogm_recursive",))


def check_nag_rate(ctx):
    worst, where = 0.0, None
    iters = ctx.p["rate_iters"]
    for label, oracle, x0 in ctx.method_instances():
        for kind in ("nag_recursive", "nag_linear"):
            seq = StepSequence(kind)
            rec = ctx.method_record(label, oracle, x0, M.NAG_3SEQ, kind, ctx.p["method_iters"])
            n = min(iters, len(rec.gaps) - 1)
            t_prev = np.array([seq.value(k - 1) for k in range(1, n + 1)])
            for i, z in enumerate(oracle.known_minimizers):
                base = 0.5 * oracle.lipschitz * float((np.asarray(x0) - z) @ (np.asarray(x0) - z))
                excess = rec.gaps[1:n + 1] * t_prev ** 2 - base
                scaled = float(np.max(excess)) / max(1.0, base)
                if scaled > worst:
                    worst, where = scaled, f"{label}/{kind}/z{i}"
    return [_report("nag-rate", worst, where, 1e-9)]


def _equiv_instances(ctx):
    items = [("segment2d", P.get_catalog_entry("segment2d").oracle, P.default_start("segment2d"))]
    for s in range(ctx.p["equiv_oracles"]):
        oracle, x0 = P.random_quadratic(_RANDOM_DIMS[s % 3], seed=100 + s)
        items.append((f"random#{100 + s}", oracle, x0))
    return items


def _equivalence_report(ctx, check_id, m_std, m_3seq, seq_kind):
    worst, where = 0.0, None
    steps = ctx.p["equiv_steps"]
    for label, oracle, x0 in _equiv_instances(ctx):
        rec_a = M.run_method(m_std, oracle, StepSequence(seq_kind), steps, x0=x0,
                             record_energies=False)
        rec_b = M.run_method(m_3seq, oracle, StepSequence(seq_kind), steps, x0=x0,
                             record_energies=False)
        scale = max(1.0, float(np.linalg.norm(x0)))
        for (ka, xa), (kb, xb) in zip(rec_a.snapshots, rec_b.snapshots):
            d = float(np.linalg.norm(xa - xb)) / scale
            if d > worst:
                worst, where = d, f"{label}@k={ka}"
    return _report(check_id, worst, where, 1e-8)


def check_nag_equivalence(ctx):
    return [_equivalence_report(ctx, "nag-equivalence", M.NAG_STD, M.NAG_3SEQ, "nag_recursive")]


def check_ogm_equivalence(ctx):
    return [_equivalence_report(ctx, "ogm-equivalence", M.OGM_STD, M.OGM_3SEQ, "ogm_recursive")]


def check_nag_boundedness(ctx):
    worst, where = 0.0, None
    for label, oracle, x0 in ctx.method_instances():
        rec = ctx.method_record(label, oracle, x0, M.NAG_3SEQ, "nag_recursive",
                                ctx.p["method_iters"])
        bound = max(float(np.linalg.norm(x0)), rec.sup_norms["z"])
        excess = rec.sup_norms["x"] - bound
        if excess > worst:
            worst, where = excess, label
    return [_report("nag-boundedness", worst, where, 1e-9)]


def check_ogm_boundedness(ctx):
    worst, where = 0.0, None
    for label, oracle, x0 in ctx.method_instances():
        rec = ctx.method_record(label, oracle, x0, M.OGM_3SEQ, "ogm_recursive",
                                ctx.p["method_iters"])
        m = rec.sup_norms["z"]
        b = max(float(np.linalg.norm(x0)), 2.0 * m)
        excess = max(rec.sup_norms["y"] - b, rec.sup_norms["x"] - (b + m))
        if excess > worst:
            worst, where = excess, label
    return [_report("ogm-boundedness", worst, where, 1e-9)]


def check_ogm_bracket(ctx):
    worst, where = 0.0, None
    for label, oracle, x0 in ctx.method_instances():
        rec = ctx.method_record(label, oracle, x0, M.OGM_3SEQ, "ogm_recursive",
                                ctx.p["method_iters"])
        if rec.min_bracket is not None and -rec.min_bracket > worst:
            worst, where = -rec.min_bracket, label
    return [_report("ogm-bracket", worst, where, 1e-12)]


def _two_minimizer_entries(ctx):
    return [e for e in ctx.catalog() if len(e.oracle.known_minimizers) >= 2]


def check_nag_recursion_identity(ctx):
    worst_rep = None
    for entry in _two_minimizer_entries(ctx):
        zs = entry.oracle.known_minimizers
        x0 = P.default_start(entry.id)
        for i in range(len(zs)):
            for j in range(i + 1, len(zs)):
                seq = StepSequence("nag_recursive")
                series = diag.collect_nag_pair_gaps(entry.oracle, seq, x0,
                                                    ctx.p["pair_iters"], zs[i], zs[j])
                rep = diag.nag_recursion_residual(series, seq, entry.oracle.lipschitz,
                                                  check_id="nag-recursion-identity")
                rep.notes = f"{entry.id} pair ({i},{j})"
                if worst_rep is None or rep.max_violation / rep.tolerance > worst_rep.max_violation / worst_rep.tolerance:
                    worst_rep = rep
    return [worst_rep]


def check_ogm_recursion_identity(ctx):
    worst_rep = None
    for entry in _two_minimizer_entries(ctx):
        zs = entry.oracle.known_minimizers
        x0 = P.default_start(entry.id)
        for i in range(len(zs)):
            for j in range(i + 1, len(zs)):
                seq = StepSequence("ogm_recursive")
                series, h_y = diag.collect_ogm_pair_gaps(entry.oracle, seq, x0,
                                                         ctx.p["pair_iters"], zs[i], zs[j])
                rep = diag.ogm_recursion_residual(series, h_y, seq, entry.oracle.lipschitz,
                                                  check_id="ogm-recursion-identity")
                rep.notes = f"{entry.id} pair ({i},{j}); " + rep.notes
                if worst_rep is None or rep.max_violation / rep.tolerance > worst_rep.max_violation / worst_rep.tolerance:
                    worst_rep = rep
    return [worst_rep]


def check_ogm_identity_audit(ctx):
    entry = P.get_catalog_entry("segment2d")
    audit = M.ogm_identity_audit(entry.oracle, P.default_start("segment2d"), iters=100)
    ok = audit["holds"] == "x_{k+1} = y_k + (z_{k+1} - z_k)/(2 theta_k)"
    return [_report(
        "ogm-identity-audit",
        audit["residual_x_relation"] if ok else math.inf,
        None,
        1e-10,
        notes=f"holds: {audit['holds']}; residual of y-variant {audit['residual_y_relation']:.3e}",
    )]


# ---------------------------------------------------------------------------
# ODE checks

_R3_PIDS = ("quad-iso", "quad-diag", "segment2d")
_SUB3_PIDS = ("quad-iso", "segment2d", "quad-degenerate")


def check_ode_r3_energy_monotone(ctx):
    worst, where = 0.0, None
    for pid in _R3_PIDS:
        oracle, traj, recs = ctx.ode_run(pid, 3.0, 0.0, ctx.p["r3_horizon"])
        for j in range(len(recs)):
            E = np.array([rec.e_z for rec in recs[j]])
            rep = diag.monotone_check(E, 1e-8)
            scaled = rep.max_violation / max(1.0, E[0])
            if scaled > worst:
                worst, where = scaled, f"{pid}/z{j}"
    return [_report("ode-r3-energy-monotone", worst, where, 1e-8)]


def check_ode_r3_rate(ctx):
    worst, where = 0.0, None
    for pid in _R3_PIDS:
        oracle, traj, recs = ctx.ode_run(pid, 3.0, 0.0, ctx.p["r3_horizon"])
        gaps = np.array([oracle.gap(x) for x in traj.xs[1:]])
        for j in range(len(recs)):
            E0 = recs[j][0].e_z
            excess = float(np.max(gaps - E0 / traj.ts[1:] ** 2))
            if excess > worst:
                worst, where = excess, f"{pid}/z{j}"
    return [_report("ode-r3-rate", worst, where, 1e-8)]


def check_ode_r3_trajectory_bound(ctx):
    worst, where = 0.0, None
    for pid in _R3_PIDS:
        oracle, traj, recs = ctx.ode_run(pid, 3.0, 0.0, ctx.p["r3_horizon"])
        for j, z in enumerate(oracle.known_minimizers):
            dist = np.linalg.norm(traj.xs - z, axis=1)
            bound = 0.5 * math.sqrt(2.0 * recs[j][0].e_z)
            excess = float(np.max(dist)) - bound
            if excess > worst:
                worst, where = excess, f"{pid}/z{j}"
    return [_report("ode-r3-trajectory-bound", worst, where, 1e-6)]


def check_ode_sub3_energy_monotone(ctx):
    worst, where = 0.0, None
    for pid in _SUB3_PIDS:
        for r in ctx.p["sub3_rs"]:
            oracle, traj, recs = ctx.ode_run(pid, r, 1.0, ctx.p["sub3_horizon"])
            for j in range(len(recs)):
                for field in ("e_z", "f_z"):
                    series = np.array([getattr(rec, field) for rec in recs[j]])
                    rep = diag.monotone_check(series, 1e-8)
                    scaled = rep.max_violation / max(1.0, series[0])
                    if scaled > worst:
                        worst, where = scaled, f"{pid}/r={r}/{field}/z{j}"
    return [_report("ode-sub3-energy-monotone", worst, where, 1e-8)]


def check_ode_sub3_rate(ctx):
    worst, where = 0.0, None
    for pid in _SUB3_PIDS:
        for r in ctx.p["sub3_rs"]:
            oracle, traj, recs = ctx.ode_run(pid, r, 1.0, ctx.p["sub3_horizon"])
            gaps = np.array([oracle.gap(x) for x in traj.xs])
            for j in range(len(recs)):
                F0 = recs[j][0].f_z
                excess = float(np.max(gaps - F0 / traj.ts ** (2.0 * r / 3.0)))
                if excess > worst:
                    worst, where = excess, f"{pid}/r={r}/z{j}"
    return [_report("ode-sub3-rate", worst, where, 1e-8)]


def check_ode_sub3_growth(ctx):
    worst, where = 0.0, None
    asym_worst, asym_where = 0.0, None
    for pid in _SUB3_PIDS:
        for r in ctx.p["sub3_rs"]:
            oracle, traj, recs = ctx.ode_run(pid, r, 1.0, ctx.p["sub3_horizon"])
            for j, z in enumerate(oracle.known_minimizers):
                dist = np.linalg.norm(traj.xs - z, axis=1)
                F0 = recs[j][0].f_z
                first = (3.0 / math.sqrt(r * (3.0 - r))) * math.sqrt(F0) * traj.ts ** ((3.0 - r) / 3.0)
                excess = float(np.max(dist - first))
                if excess > worst:
                    worst, where = excess, f"{pid}/r={r}/z{j}"
                # asymptotic branch: for t >= 10 t0 the leading coefficient
                # (2 sqrt2/(r+1)) sqrt(E(t0)) may be exceeded by at most 10%
                m = traj.ts >= 10.0
                if np.any(m):
                    E0 = recs[j][0].e_z
                    lead = (2.0 * math.sqrt(2.0) / (r + 1.0)) * math.sqrt(E0)
                    ratio = float(np.max(dist[m] / traj.ts[m] ** ((3.0 - r) / 2.0)))
                    rel = ratio / lead - 1.0
                    if rel > asym_worst:
                        asym_worst, asym_where = rel, f"{pid}/r={r}/z{j}"
    return [
        _report("ode-sub3-growth", worst, where, 1e-6),
        _report("ode-sub3-growth/asymptotic", max(0.0, asym_worst), asym_where, 0.1),
    ]


def check_ode_boundedness_report(ctx):
    sups = []
    for r in ctx.p["sub3_rs"]:
        oracle, traj, recs = ctx.ode_run("quad-degenerate", r, 1.0, ctx.p["sub3_horizon"])
        z = oracle.known_minimizers[0]
        sups.append(f"r={r}: sup||X-z|| = {float(np.max(np.linalg.norm(traj.xs - z, axis=1))):.6g}")
    return [_report(
        "ode-boundedness-report", 0.0, None, 0.0,
        notes="open problem (unbounded argmin, r<3): " + "; ".join(sups) + "; nothing asserted",
    )]


def check_ode_order(ctx):
    entry = P.get_catalog_entry("quad-iso")
    tol = 1e-6
    ends = []
    for t in (tol, tol / 2):
        cfg = O.OdeConfig(r=3.0, t0=0.0, x0=P.default_start("quad-iso"),
                          v0=np.zeros(2), horizon=ctx.p["r3_horizon"],
                          rel_tol=t, abs_tol=t * 1e-3)
        traj, _ = O.integrate(entry.oracle, cfg, [])
        ends.append(traj.xs[-1])
    diff = float(np.linalg.norm(ends[0] - ends[1]))
    scale = max(1.0, float(np.linalg.norm(ends[1])))
    return [_report("ode-order", diff, None, 10.0 * tol * scale,
                    notes=f"terminal shift {diff:.3e} when halving tolerances from {tol:g}")]


def check_ode_pairgap_r3(ctx):
    g = ctx.golden["pairgap_r3"]
    reports = []
    for pid in ("segment2d", "quad-degenerate"):
        oracle, traj, recs = ctx.ode_run(pid, 3.0, 0.0, ctx.p["pg3_horizon"])
        zs = list(oracle.known_minimizers)
        rep = diag.ode_pairgap_check(traj, zs[0], recs[0], zs[-1], recs[-1], 3.0,
                                     check_id=f"ode-pairgap-r3/{pid}")
        if pid == g["problem"]:
            raw = _report("ode-pairgap-r3/raw-residual", rep.max_raw_residual, None,
                          g["raw_residual_max"], notes="golden ceiling from reference run")
            reports.extend([rep, raw])
        else:
            reports.append(rep)
    return reports


def check_ode_pairgap_sub3(ctx):
    g = ctx.golden["pairgap_r2"]
    oracle, traj, recs = ctx.ode_run(g["problem"], g["r"], g["t0"], ctx.p["pg2_horizon"])
    zs = list(oracle.known_minimizers)
    rep = diag.ode_pairgap_check(traj, zs[0], recs[0], zs[-1], recs[-1], g["r"],
                                 check_id="ode-pairgap-sub3")
    h_limit = _report("ode-pairgap-sub3/H-limit", abs(rep.H_end), None, g["H_end_max"],
                      notes="terminal energy-difference estimate; 0 in the limit for bounded argmin")
    return [rep, h_limit]


# ---------------------------------------------------------------------------
# divergent-regime checks

_CE_CYCLE = (O.ENTER_FLAT_FROM_RIGHT, O.EXIT_FLAT_LEFT, O.ENTER_FLAT_FROM_LEFT, O.EXIT_FLAT_RIGHT)


def check_counterexample_events(ctx):
    g = ctx.golden["counterexample"]
    traj = ctx.ce_run()
    events = traj.events
    count_violation = abs(len(events) - g["event_count"])
    mism = sum(1 for i, ev in enumerate(events) if ev.kind != _CE_CYCLE[i % 4])
    zero_v = sum(1 for ev in events if ev.velocity == 0.0)
    reports = [
        _report("counterexample-events", float(count_violation), None, 0.0,
                notes=f"{len(events)} events vs golden {g['event_count']} "
                      f"(reference integration at rel_tol 1e-12); "
                      f"{mism} pattern mismatches, {zero_v} zero-velocity events"),
        _report("counterexample-events/pattern", float(mism + zero_v), None, 0.0,
                notes="kinds must cycle right-enter, left-exit, left-enter, right-exit"),
    ]
    if events:
        dt1 = abs(events[0].t - g["event_times"][0])
        dv1 = abs(events[0].velocity - g["event_velocities"][0])
        sign_ok = events[0].velocity < 0.0
        reports.append(_report(
            "counterexample-events/first-event",
            max(dt1, dv1) if sign_ok else math.inf,
            events[0].t,
            1e-6,
            notes=f"t1 off by {dt1:.2e}, v1 off by {dv1:.2e}, entering velocity negative: {sign_ok}",
        ))
    return reports


def check_counterexample_sturm(ctx):
    rep = O.sturm_excursion_check(ctx.ce_run(), 1.0)
    rep.check_id = "counterexample-sturm"
    return [rep]


def check_counterexample_gap_bound(ctx):
    traj = ctx.ce_run()
    events = traj.events
    worst, where = 0.0, None
    for i in range(len(events) - 1):
        if events[i].kind in (O.ENTER_FLAT_FROM_RIGHT, O.ENTER_FLAT_FROM_LEFT):
            need = 2.0 / abs(events[i].velocity)
            got = events[i + 1].t - events[i].t
            if need - got > worst:
                worst, where = need - got, events[i].t
    return [_report("counterexample-gap-bound", worst, where, 1e-9,
                    notes="flat-region traversal time at least 2/|entry velocity|")]


def check_counterexample_osc_monotone(ctx):
    traj = ctx.ce_run()
    osc = O.oscillator_energy(traj, P.make_counterexample_1d())
    rep = diag.monotone_check(osc, 1e-8, check_id="counterexample-osc-monotone")
    return [rep]


# ---------------------------------------------------------------------------
# diagnostics checks

def check_toeplitz_synthetic(ctx):
    K = 10_000
    c = 0.7
    h_const = np.full(K, c)
    phi = np.arange(1.0, K)
    rep1 = diag.toeplitz_check(h_const, phi, c, tol=1e-12, check_id="toeplitz-synthetic/constant")
    c2 = 0.3
    ks = np.arange(K, dtype=float)
    h_harm = c2 + 1.0 / (ks + 1.0)
    rep2 = diag.toeplitz_check(h_harm, ks + 1.0, c2, tol=1.0 / K + 1e-9,
                               check_id="toeplitz-synthetic/harmonic")
    return [rep1, rep2]


def check_toeplitz_contraction(ctx):
    rng = np.random.default_rng(105)
    c, h0, K = -0.2, 3.0, 2000
    phi = rng.uniform(0.5, 50.0, K)
    h = np.empty(K + 1)
    h[0] = h0
    for k in range(K):
        # combined series identically c  =>  gap contracts by phi/(1+phi)
        h[k + 1] = (c + phi[k] * h[k]) / (1.0 + phi[k])
    bound = abs(h0 - c) * float(np.prod(phi / (1.0 + phi)))
    gap = abs(h[-1] - c)
    rep = diag.toeplitz_check(h, phi, c, tol=bound + 1e-12, check_id="toeplitz-contraction")
    gaps = np.abs(h - c)
    monotone = float(np.max(np.diff(gaps)))
    rep2 = _report("toeplitz-contraction/monotone", max(0.0, monotone), None, 1e-15,
                   notes=f"terminal gap {gap:.3e} vs product bound {bound:.3e}")
    return [rep, rep2]


def check_toeplitz_nag(ctx):
    g = ctx.golden["toeplitz_nag"]
    entry = P.get_catalog_entry("segment2d")
    zs = entry.oracle.known_minimizers
    seq = StepSequence("nag_recursive")
    series = diag.collect_nag_pair_gaps(entry.oracle, seq, P.default_start("segment2d"),
                                        g["iters"], zs[0], zs[2])
    L = entry.oracle.lipschitz
    c = (2.0 / L) * float(series.H[-1])
    phi = np.array([seq.value(k) - 1.0 for k in range(2, g["iters"])])
    rep = diag.toeplitz_check(series.h[2:], phi, c, tol=g["terminal_gap_max"],
                              check_id="toeplitz-nag")
    rep.notes += f"; c = (2/L) H_end = {c:.6g}"
    return [rep]


def _tail_reports(ctx, method, seq_kind, tag):
    g = ctx.golden[f"{tag}_segment2d"]
    rec = ctx.tail_record(method, seq_kind)
    td = diag.tail_diameter(rec.snapshots, g["window"])
    limit = rec.snapshots[-1][1]
    return [
        _report(f"tail-diameter-{tag}", td, None, 1e-3,
                notes=f"window {g['window']} snapshots of {g['iters']} iterations"),
        _report(f"tail-diameter-{tag}/limit", abs(float(limit[0]) - g["limit_x1"]), None, 1e-3,
                notes=f"limit x1 = {float(limit[0]):.6g} vs golden {g['limit_x1']:.6g}"),
    ]


def check_tail_diameter_nag(ctx):
    return _tail_reports(ctx, M.NAG_3SEQ, "nag_recursive", "nag")


def check_tail_diameter_ogm(ctx):
    return _tail_reports(ctx, M.OGM_3SEQ, "ogm_recursive", "ogm")


CHECKS = [
    ("problem-convexity", check_problem_convexity),
    ("problem-cocoercivity", check_problem_cocoercivity),
    ("problem-gradient-fd", check_problem_gradient_fd),
    ("problem-grad-lipschitz-1d", check_problem_grad_lipschitz_1d),
    ("seq-growth", check_seq_growth),
    ("nag-energy-monotone", check_nag_energy_monotone),
    ("nag-rate", check_nag_rate),
    ("nag-equivalence", check_nag_equivalence),
    ("nag-boundedness", check_nag_boundedness),
    ("nag-recursion-identity", check_nag_recursion_identity),
    ("ogm-energy-monotone", check_ogm_energy_monotone),
    ("ogm-bracket", check_ogm_bracket),
    ("ogm-equivalence", check_ogm_equivalence),
    ("ogm-boundedness", check_ogm_boundedness),
    ("ogm-recursion-identity", check_ogm_recursion_identity),
    ("ogm-identity-audit", check_ogm_identity_audit),
    ("ode-r3-energy-monotone", check_ode_r3_energy_monotone),
    ("ode-r3-rate", check_ode_r3_rate),
    ("ode-r3-trajectory-bound", check_ode_r3_trajectory_bound),
    ("ode-sub3-energy-monotone", check_ode_sub3_energy_monotone),
    ("ode-sub3-rate", check_ode_sub3_rate),
    ("ode-sub3-growth", check_ode_sub3_growth),
    ("ode-boundedness-report", check_ode_boundedness_report),
    ("ode-order", check_ode_order),
    ("ode-pairgap-r3", check_ode_pairgap_r3),
    ("ode-pairgap-sub3", check_ode_pairgap_sub3),
    ("counterexample-events", check_counterexample_events),
    ("counterexample-sturm", check_counterexample_sturm),
    ("counterexample-gap-bound", check_counterexample_gap_bound),
    ("counterexample-osc-monotone", check_counterexample_osc_monotone),
    ("toeplitz-synthetic", check_toeplitz_synthetic),
    ("toeplitz-contraction", check_toeplitz_contraction),
    ("toeplitz-nag", check_toeplitz_nag),
    ("tail-diameter-nag", check_tail_diameter_nag),
    ("tail-diameter-ogm", check_tail_diameter_ogm),
]


def verify_suite(budget: str = "quick", filter_glob: str | None = None,
                 golden_path=None, printer=print):
    """Run the named checks; returns (reports, all_passed)."""
    if budget not in BUDGETS:
        raise ValueError(f"unknown budget {budget!r}; choose from {sorted(BUDGETS)}")
    golden = load_golden(golden_path)
    ctx = VerifyContext(budget, golden)
    reports = []
    for check_id, fn in CHECKS:
        if filter_glob and not fnmatch.fnmatch(check_id, filter_glob):
            continue
        try:
            out = fn(ctx)
        except Exception as exc:  # a broken check must surface as a named failure
            out = [_report(check_id, math.inf, None, 0.0,
                           notes=f"check raised {type(exc).__name__}: {exc}")]
        for rep in out:
            reports.append(rep)
            if printer is not None:
                status = "PASS" if rep.passed else "FAIL"
                printer(f"[{status}] {rep.check_id:38s} violation={rep.max_violation:.3e} "
                        f"tol={rep.tolerance:.3e}")
    return reports, all(r.passed for r in reports)
