"""Accelerated first-order methods in their published forms.

Implements the two-sequence and three-sequence forms of the accelerated
gradient method (NAG) and of the optimized gradient method (OGM), plus a
plain gradient-descent baseline, together with the per-iteration energy
functions used to certify monotone decrease and the O(1/k^2) rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .sequences import StepSequence

NAG_STD = "nag_std"
NAG_3SEQ = "nag_3seq"
OGM_STD = "ogm_std"
OGM_3SEQ = "ogm_3seq"
GD = "gd"

METHODS = (NAG_STD, NAG_3SEQ, OGM_STD, OGM_3SEQ, GD)

# dense snapshots up to this iteration, logarithmic afterwards
_DENSE_SNAPSHOTS = 1000
_SNAPSHOTS_PER_DECADE = 1500


@dataclass
class MethodState:
    """One iterate: (k, x_k, y_k, z_k, t_k or theta_k, cached grad f(y_k))."""

    k: int
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray | None
    seq_val: float
    grad_y: np.ndarray


def initial_state(oracle, x0, seq: StepSequence | None, with_z: bool = True) -> MethodState:
    x0 = np.array(x0, dtype=float)
    if x0.shape != (oracle.dim,):
        raise ValueError(f"x0 must have shape ({oracle.dim},)")
    seq_val = seq.value(0) if seq is not None else 1.0
    return MethodState(
        k=0,
        x=x0,
        y=x0.copy(),
        z=x0.copy() if with_z else None,
        seq_val=seq_val,
        grad_y=np.asarray(oracle.gradient(x0), dtype=float),
    )


def _check_grad(g, k):
    if not np.all(np.isfinite(g)):
        raise NumericalError("non-finite gradient", at=k)
    return g


def nag_step_standard(state: MethodState, oracle, seq: StepSequence) -> MethodState:
    """x_{k+1} = y_k - grad f(y_k)/L;  y_{k+1} = x_{k+1} + ((t_k-1)/t_{k+1}) (x_{k+1} - x_k)."""
    k = state.k
    t_k = state.seq_val
    t_next = seq.value(k + 1)
    x_new = state.y - state.grad_y / oracle.lipschitz
    y_new = x_new + ((t_k - 1.0) / t_next) * (x_new - state.x)
    g = _check_grad(oracle.gradient(y_new), k + 1)
    return MethodState(k + 1, x_new, y_new, None, t_next, g)


def nag_step_threeseq(state: MethodState, oracle, seq: StepSequence) -> MethodState:
    """Equivalent (x, y, z) form driven by the aggregated-gradient point z."""
    if state.z is None:
        raise ValueError("three-sequence step needs state.z (start from x0 = y0 = z0)")
    k = state.k
    t_k = state.seq_val
    t_next = seq.value(k + 1)
    L = oracle.lipschitz
    x_new = state.y - state.grad_y / L
    z_new = state.z - (t_k / L) * state.grad_y
    y_new = (1.0 - 1.0 / t_next) * x_new + (1.0 / t_next) * z_new
    g = _check_grad(oracle.gradient(y_new), k + 1)
    return MethodState(k + 1, x_new, y_new, z_new, t_next, g)


def ogm_step_standard(state: MethodState, oracle, seq: StepSequence) -> MethodState:
    """OGM two-sequence form with the extra (x_{k+1} - y_k) momentum term."""
    k = state.k
    th_k = state.seq_val
    th_next = seq.value(k + 1)
    x_new = state.y - state.grad_y / oracle.lipschitz
    y_new = (
        x_new
        + ((th_k - 1.0) / th_next) * (x_new - state.x)
        + (th_k / th_next) * (x_new - state.y)
    )
    g = _check_grad(oracle.gradient(y_new), k + 1)
    return MethodState(k + 1, x_new, y_new, None, th_next, g)


def ogm_step_threeseq(state: MethodState, oracle, seq: StepSequence) -> MethodState:
    """OGM (x, y, z) form; z takes doubled aggregated-gradient steps.

    Each step also audits the defining identity
    theta_{k+1} y_{k+1} - (theta_{k+1} - 1) x_{k+1} = z_{k+1}, which must hold
    to roundoff by construction.
    """
    if state.z is None:
        raise ValueError("three-sequence step needs state.z (start from x0 = y0 = z0)")
    k = state.k
    th_k = state.seq_val
    th_next = seq.value(k + 1)
    L = oracle.lipschitz
    x_new = state.y - state.grad_y / L
    z_new = state.z - (2.0 * th_k / L) * state.grad_y
    y_new = (1.0 - 1.0 / th_next) * x_new + (1.0 / th_next) * z_new
    residual = np.linalg.norm(th_next * y_new - (th_next - 1.0) * x_new - z_new)
    # evaluating theta y - (theta - 1) x cancels to an O(1) z, so the float
    # residual scales with theta * ||y||; tolerate exactly that conditioning
    cond = max(1.0, th_next * (float(np.linalg.norm(y_new)) + float(np.linalg.norm(x_new))))
    if residual > 1e-12 * cond:
        raise NumericalError(f"z-identity residual {residual:g}", at=k + 1)
    g = _check_grad(oracle.gradient(y_new), k + 1)
    return MethodState(k + 1, x_new, y_new, z_new, th_next, g)


def gd_step(state: MethodState, oracle) -> MethodState:
    """Plain gradient descent x_{k+1} = x_k - grad f(x_k)/L (y tracks x)."""
    x_new = state.x - state.grad_y / oracle.lipschitz
    g = _check_grad(oracle.gradient(x_new), state.k + 1)
    return MethodState(state.k + 1, x_new, x_new, None, 1.0, g)


def reconstruct_z(state: MethodState) -> np.ndarray:
    """z_k from any form: stored if present, else t_k y_k - (t_k - 1) x_k."""
    if state.z is not None:
        return state.z
    return state.seq_val * state.y - (state.seq_val - 1.0) * state.x


def energy_nag(state: MethodState, oracle, z_star, t_prev: float, gap: float | None = None) -> float:
    """E_k = t_{k-1}^2 (f(x_k) - fstar) + (L/2) ||z_k - z_star||^2.

    ``t_prev`` is t_{k-1} with the convention t_{-1} = 0, so at k = 0 this is
    the base value (L/2) ||x_0 - z_star||^2.
    """
    if gap is None:
        gap = oracle.gap(state.x)
    d = reconstruct_z(state) - np.asarray(z_star, dtype=float)
    return t_prev * t_prev * gap + 0.5 * oracle.lipschitz * float(d @ d)


def ogm_bracket(state: MethodState, oracle) -> float:
    """Cocoercivity bracket f(y_k) - fstar - ||grad f(y_k)||^2 / (2L).

    Nonnegative for any L-smooth convex oracle; a materially negative value
    means the oracle's declared L is wrong.
    """
    g = state.grad_y
    return oracle.gap(state.y) - float(g @ g) / (2.0 * oracle.lipschitz)


def energy_ogm(state: MethodState, oracle, z_star, bracket: float | None = None) -> float:
    """E_k = 2 theta_k^2 [f(y_k) - fstar - ||grad f(y_k)||^2/(2L)] + (L/2) ||z_{k+1} - z_star||^2.

    z_{k+1} is reproduced from the state via the z-update, so the energy is
    computable from iterate k alone.  Raises if the bracket is negative
    beyond roundoff, which would signal a violated smoothness constant.
    """
    if bracket is None:
        bracket = ogm_bracket(state, oracle)
    if bracket < -1e-12 * max(1.0, abs(oracle.gap(state.y))):
        raise NumericalError(f"cocoercivity bracket {bracket:g} < 0; oracle violates L-smoothness", at=state.k)
    th_k = state.seq_val
    z_next = reconstruct_z(state) - (2.0 * th_k / oracle.lipschitz) * state.grad_y
    d = z_next - np.asarray(z_star, dtype=float)
    return 2.0 * th_k * th_k * bracket + 0.5 * oracle.lipschitz * float(d @ d)


@dataclass
class RunRecord:
    """Per-iteration record of a method run.

    ``energies[i]`` holds E_k for minimizer index i over k = 0..iters;
    ``energy_base[i]`` is the k = -1 base value (L/2) ||x_0 - z_i||^2 (equal
    to E_0 for NAG; the extra first element of the OGM monotone chain).
    """

    method: str
    gaps: np.ndarray
    grad_norms: np.ndarray
    energies: dict
    energy_base: dict
    snapshots: list
    sup_norms: dict
    min_bracket: float | None
    final_state: MethodState


def snapshot_schedule(iters: int, stride: int | None) -> set:
    """Iteration indices to snapshot: dense early, logarithmic afterwards."""
    if stride is not None:
        if stride < 1:
            raise ValueError("stride must be >= 1")
        ks = set(range(0, iters + 1, stride))
    else:
        ks = set(range(0, min(iters, _DENSE_SNAPSHOTS) + 1))
        if iters > _DENSE_SNAPSHOTS:
            span = np.log10(iters) - np.log10(_DENSE_SNAPSHOTS)
            count = max(2, int(np.ceil(span * _SNAPSHOTS_PER_DECADE)))
            grid = np.logspace(np.log10(_DENSE_SNAPSHOTS), np.log10(iters), count)
            ks.update(int(round(g)) for g in grid)
    ks.add(iters)
    return ks


def run_method(method: str, oracle, seq: StepSequence | None, iters: int,
               snapshot_stride: int | None = None, *, x0,
               record_energies: bool = True) -> RunRecord:
    """Run a stepper for ``iters`` iterations with full instrumentation.

    Records objective gaps, gradient norms at y_k, the per-minimizer energy
    series (NAG or OGM energy, depending on the method; none for gd), strided
    iterate snapshots, and running sup-norms of x, y, z.  Energy recording
    can be switched off for long point-convergence runs where only the
    iterates matter.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; known: {METHODS}")
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if method != GD and seq is None:
        raise ValueError(f"method {method} needs a step sequence")

    with_z = method in (NAG_3SEQ, OGM_3SEQ)
    state = initial_state(oracle, x0, seq, with_z=with_z)
    minimizers = oracle.known_minimizers
    L = oracle.lipschitz

    gaps = np.empty(iters + 1)
    grad_norms = np.empty(iters + 1)
    is_nag = record_energies and method in (NAG_STD, NAG_3SEQ)
    is_ogm = record_energies and method in (OGM_STD, OGM_3SEQ)
    energies = {i: np.empty(iters + 1) for i in range(len(minimizers))} if (is_nag or is_ogm) else {}
    energy_base = {
        i: 0.5 * L * float((state.x - z) @ (state.x - z)) for i, z in enumerate(minimizers)
    } if (is_nag or is_ogm) else {}

    snap_ks = snapshot_schedule(iters, snapshot_stride)
    snapshots = []
    sup_x = sup_y = sup_z = 0.0
    min_bracket = math.inf if is_ogm else None

    def observe(st: MethodState):
        nonlocal sup_x, sup_y, sup_z
        k = st.k
        gap = oracle.gap(st.x)
        gaps[k] = gap
        grad_norms[k] = float(np.linalg.norm(st.grad_y))
        if is_nag:
            t_prev = seq.value(k - 1)
            for i, z in enumerate(minimizers):
                energies[i][k] = energy_nag(st, oracle, z, t_prev, gap=gap)
        elif is_ogm:
            nonlocal min_bracket
            br = ogm_bracket(st, oracle)
            min_bracket = min(min_bracket, br)
            for i, z in enumerate(minimizers):
                energies[i][k] = energy_ogm(st, oracle, z, bracket=br)
        if k in snap_ks:
            snapshots.append((k, st.x.copy()))
        sup_x = max(sup_x, float(np.linalg.norm(st.x)))
        sup_y = max(sup_y, float(np.linalg.norm(st.y)))
        if st.z is not None:
            sup_z = max(sup_z, float(np.linalg.norm(st.z)))

    observe(state)
    try:
        if method == NAG_STD:
            for _ in range(iters):
                state = nag_step_standard(state, oracle, seq)
                observe(state)
        elif method == NAG_3SEQ:
            for _ in range(iters):
                state = nag_step_threeseq(state, oracle, seq)
                observe(state)
        elif method == OGM_STD:
            for _ in range(iters):
                state = ogm_step_standard(state, oracle, seq)
                observe(state)
        elif method == OGM_3SEQ:
            for _ in range(iters):
                state = ogm_step_threeseq(state, oracle, seq)
                observe(state)
        else:
            for _ in range(iters):
                state = gd_step(state, oracle)
                observe(state)
    except NumericalError as err:
        if err.at is None:
            err.at = state.k + 1
        raise
    except (OverflowError, FloatingPointError):
        raise NumericalError("non-finite objective value", at=state.k + 1)

    return RunRecord(
        method=method,
        gaps=gaps,
        grad_norms=grad_norms,
        energies=energies,
        energy_base=energy_base,
        snapshots=snapshots,
        sup_norms={"x": sup_x, "y": sup_y, "z": sup_z},
        min_bracket=min_bracket,
        final_state=state,
    )


def ogm_identity_audit(oracle, x0, iters: int = 100, seq: StepSequence | None = None) -> dict:
    """Decide numerically which z-increment identity the OGM updates satisfy.

    Two candidate relations circulate for the three-sequence form:
    (a) x_{k+1} = y_k + (z_{k+1} - z_k) / (2 theta_k)
    (b) y_{k+1} = x_k + (z_{k+1} - z_k) / (2 theta_k)
    Only one can be an identity of the updates; this audit reports the max
    residual of each along an actual run and names the one that holds.
    """
    if seq is None:
        seq = StepSequence("ogm_recursive")
    state = initial_state(oracle, x0, seq, with_z=True)
    res_a = 0.0
    res_b = 0.0
    for _ in range(iters):
        new = ogm_step_threeseq(state, oracle, seq)
        incr = (new.z - state.z) / (2.0 * state.seq_val)
        res_a = max(res_a, float(np.linalg.norm(new.x - (state.y + incr))))
        res_b = max(res_b, float(np.linalg.norm(new.y - (state.x + incr))))
        state = new
    tol = 1e-10 * max(1.0, float(np.linalg.norm(np.asarray(x0, dtype=float))))
    if res_a <= tol and res_b > tol:
        holds = "x_{k+1} = y_k + (z_{k+1} - z_k)/(2 theta_k)"
    elif res_b <= tol and res_a > tol:
        holds = "y_{k+1} = x_k + (z_{k+1} - z_k)/(2 theta_k)"
    else:
        holds = "inconclusive"
    return {
        "residual_x_relation": res_a,
        "residual_y_relation": res_b,
        "holds": holds,
        "iters": iters,
    }
