"""Reference golden values: tight-tolerance generation and packaged access.

Quantities that no finite argument can pin down a priori (event counts,
limit coordinates, residual scales) are frozen from reference runs: ODE
references integrate at rel_tol 1e-12, discrete references run the exact
configuration the checks replay.  ``python -m accellab.golden`` regenerates
the packaged ``golden.json``.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

_MARGIN = 2.5  # threshold = max(floor, margin * measured) for residual-like values


def load_golden(path=None) -> dict:
    if path is not None:
        return json.loads(Path(path).read_text())
    return json.loads(resources.files("accellab").joinpath("golden.json").read_text())


def _counterexample_reference(horizon: float) -> dict:
    from .ode import run_counterexample

    traj = run_counterexample(1.0, 1.0, horizon, rel_tol=1e-12, abs_tol=1e-14)
    events = traj.events
    return {
        "r": 1.0,
        "t0": 1.0,
        "horizon": horizon,
        "event_count": len(events),
        "event_times": [ev.t for ev in events],
        "event_velocities": [ev.velocity for ev in events],
        "event_kinds": [ev.kind for ev in events],
    }


def _tail_reference(method: str, seq_kind: str, iters: int) -> dict:
    from .diagnostics import tail_diameter
    from .methods import run_method
    from .problems import default_start, get_catalog_entry
    from .sequences import StepSequence

    entry = get_catalog_entry("segment2d")
    rec = run_method(method, entry.oracle, StepSequence(seq_kind), iters,
                     x0=default_start("segment2d"), record_energies=False)
    window = min(1000, len(rec.snapshots))
    td = tail_diameter(rec.snapshots, window)
    limit = rec.snapshots[-1][1]
    return {
        "iters": iters,
        "window": window,
        "tail_diameter": td,
        "limit_x1": float(limit[0]),
        "limit_x2": float(limit[1]),
    }


def _toeplitz_reference(iters: int) -> dict:
    from .diagnostics import collect_nag_pair_gaps
    from .problems import default_start, get_catalog_entry
    from .sequences import StepSequence

    entry = get_catalog_entry("segment2d")
    zs = entry.oracle.known_minimizers
    seq = StepSequence("nag_recursive")
    series = collect_nag_pair_gaps(entry.oracle, seq, default_start("segment2d"),
                                   iters, zs[0], zs[2])
    L = entry.oracle.lipschitz
    c = (2.0 / L) * float(series.H[-1])
    gap = abs(float(series.h[-1]) - c)
    return {"iters": iters, "c": c, "terminal_gap": gap,
            "terminal_gap_max": max(1e-6, _MARGIN * gap)}


def _pairgap_reference(pid: str, r: float, t0: float, horizon: float) -> dict:
    from .diagnostics import ode_pairgap_check
    from .ode import OdeConfig, integrate
    from .problems import default_start, get_catalog_entry

    entry = get_catalog_entry(pid)
    zs = list(entry.oracle.known_minimizers)
    cfg = OdeConfig(r=r, t0=t0, x0=default_start(pid),
                    v0=np.zeros(entry.oracle.dim), horizon=horizon)
    traj, recs = integrate(entry.oracle, cfg, zs)
    rep = ode_pairgap_check(traj, zs[0], recs[0], zs[-1], recs[-1], r)
    return {
        "problem": pid,
        "r": r,
        "t0": t0,
        "horizon": horizon,
        "raw_residual": rep.max_raw_residual,
        "raw_residual_max": _MARGIN * rep.max_raw_residual,
        "H_end": rep.H_end,
        "H_end_max": max(1e-3, 1.25 * abs(rep.H_end)),
        "h_end": rep.h_end,
    }


def generate_golden() -> dict:
    scales = {
        "full": dict(ce_horizon=200.0, tail_iters=100_000, toeplitz_iters=100_000,
                     pg3_horizon=100.0, pg2_horizon=1000.0),
        "quick": dict(ce_horizon=80.0, tail_iters=10_000, toeplitz_iters=10_000,
                      pg3_horizon=30.0, pg2_horizon=300.0),
    }
    out = {}
    for budget, p in scales.items():
        out[budget] = {
            "counterexample": _counterexample_reference(p["ce_horizon"]),
            "nag_segment2d": _tail_reference("nag_3seq", "nag_recursive", p["tail_iters"]),
            "ogm_segment2d": _tail_reference("ogm_3seq", "ogm_recursive", p["tail_iters"]),
            "toeplitz_nag": _toeplitz_reference(p["toeplitz_iters"]),
            "pairgap_r3": _pairgap_reference("segment2d", 3.0, 0.0, p["pg3_horizon"]),
            "pairgap_r2": _pairgap_reference("segment2d", 2.0, 1.0, p["pg2_horizon"]),
        }
    return out


def main():
    golden = generate_golden()
    target = Path(__file__).parent / "golden.json"
    target.write_text(json.dumps(golden, indent=2) + "\n")
    print(f"wrote {target}")


if __name__ == "__main__":
    main()
