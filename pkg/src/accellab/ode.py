"""Adaptive integration of the vanishing-damping oscillator ODE.

Integrates X'' + (r/t) X' + grad f(X) = 0 with a Dormand-Prince 5(4)
embedded pair, PI step-size control and a quartic dense-output interpolant.
The dense output drives event localization at |x| = 1 for the 1-D
flat-bottomed objective, and every accepted step emits energy observations
for each requested minimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .diagnostics import DiagnosticReport, make_report
from .errors import IntegrationError
from .problems import make_counterexample_1d

# Dormand-Prince 5(4) tableau (FSAL: the 7th stage is the next first stage)
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = (
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
)
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# fifth-order weights minus the embedded fourth-order weights
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# quartic dense-output weights (Shampine)
_P = np.array(
    [
        [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
# PI controller exponents for a 4th-order error estimate
_PI_ALPHA = 0.7 / 5.0
_PI_BETA = 0.4 / 5.0

_MICRO_STEP = 1e-6          # startup step bridging the t = 0 singularity
_UNDERFLOW_FRACTION = 1e-13  # of the horizon
_EVENT_SUBDIVISIONS = 16
_EVENT_MERGE_WINDOW = 1e-9

ENTER_FLAT_FROM_RIGHT = "enter_flat_from_right"
EXIT_FLAT_LEFT = "exit_flat_left"
ENTER_FLAT_FROM_LEFT = "enter_flat_from_left"
EXIT_FLAT_RIGHT = "exit_flat_right"


@dataclass(frozen=True)
class OdeConfig:
    """Damping exponent, initial data, horizon and step-controller settings.

    The initial time may be zero only in the critically damped case r = 3
    with a resting start, where the damping singularity has a removable
    limit; any r < 3 run must start at t0 > 0.
    """

    r: float
    t0: float
    x0: np.ndarray
    v0: np.ndarray
    horizon: float
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_steps: int = 1_000_000

    def __post_init__(self):
        object.__setattr__(self, "x0", np.array(self.x0, dtype=float).reshape(-1))
        object.__setattr__(self, "v0", np.array(self.v0, dtype=float).reshape(-1))
        if not self.r > 0:
            raise ValueError("r must be positive")
        if self.t0 < 0:
            raise ValueError("t0 must be nonnegative")
        if self.t0 == 0 and self.r != 3:
            raise ValueError("t0 = 0 is only supported for r = 3")
        if self.t0 == 0 and np.any(self.v0 != 0):
            raise ValueError("a start at t0 = 0 requires v0 = 0")
        if self.horizon < self.t0:
            raise ValueError("horizon must be >= t0")
        if not (0 < self.rel_tol < 1 and 0 < self.abs_tol < 1):
            raise ValueError("tolerances must lie in (0, 1)")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.x0.shape != self.v0.shape:
            raise ValueError("x0 and v0 must have matching shapes")


@dataclass
class Event:
    t: float
    kind: str
    velocity: float


@dataclass
class StepStats:
    accepted: int = 0
    rejected: int = 0
    min_step: float = math.inf
    max_step: float = 0.0


@dataclass
class ODETrajectory:
    """Accepted-step samples (t, X, V), located events, and step statistics."""

    ts: np.ndarray
    xs: np.ndarray
    vs: np.ndarray
    events: list
    step_stats: StepStats

    @property
    def samples(self):
        return list(zip(self.ts, self.xs, self.vs))


@dataclass
class EnergyRecord:
    """Energy observations at one accepted step.

    ``e_z`` is the damped Lyapunov energy for the run's exponent r, ``f_z``
    the scaled auxiliary energy (defined only for r in (1, 3)), and ``osc``
    the plain oscillator energy ||V||^2 / 2 + f(X) - fstar.
    """

    t: float
    e_z: float
    f_z: float | None
    osc: float


def energy_r3(t: float, x, v, z, oracle) -> float:
    """Critically damped energy t^2 (f - fstar) + ||t V + 2 (X - z)||^2 / 2."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    z = np.asarray(z, dtype=float)
    w = t * v + 2.0 * (x - z)
    return t * t * oracle.gap(x) + 0.5 * float(w @ w)


def _energy_general(t: float, x, v, z, r: float, oracle) -> float:
    w = t * v + (r - 1.0) * (x - z)
    return t ** (r - 3.0) * (t * t * oracle.gap(x) + 0.5 * float(w @ w))


def energy_general(t: float, x, v, z, r: float, oracle) -> float:
    """Damped energy t^(r-3) [t^2 (f - fstar) + ||t V + (r-1)(X - z)||^2 / 2].

    Reduces to :func:`energy_r3` at r = 3.  Requires t > 0.
    """
    if t <= 0:
        raise ValueError("energy_general needs t > 0")
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    z = np.asarray(z, dtype=float)
    return _energy_general(t, x, v, z, r, oracle)


def energy_F(t: float, x, v, z, r: float, oracle) -> float:
    """Auxiliary scaled energy certifying the O(t^(-2r/3)) rate for r in (1, 3)."""
    if t <= 0:
        raise ValueError("energy_F needs t > 0")
    if not (1.0 < r < 3.0):
        raise ValueError("energy_F is defined for r in (1, 3)")
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    z = np.asarray(z, dtype=float)
    d = x - z
    w = t * v + (2.0 * r / 3.0) * d
    p = 2.0 * r / 3.0
    return (
        t ** p * oracle.gap(x)
        + (r * (3.0 - r) / 9.0) * t ** (p - 2.0) * float(d @ d)
        + 0.5 * t ** (p - 2.0) * float(w @ w)
    )


def oscillator_energy(traj: ODETrajectory, oracle) -> np.ndarray:
    """||V||^2 / 2 + f(X) - fstar at every sample of a trajectory."""
    out = np.empty(len(traj.ts))
    for i, (x, v) in enumerate(zip(traj.xs, traj.vs)):
        out[i] = 0.5 * float(v @ v) + oracle.gap(x)
    return out


def _initial_step(rhs, t0, u0, f0, rtol, atol, span):
    scale = atol + rtol * np.abs(u0)
    d0 = float(np.sqrt(np.mean((u0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, span)
    u1 = u0 + h0 * f0
    f1 = rhs(t0 + h0, u1)
    d2 = float(np.sqrt(np.mean(((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span)


def _dense_coeffs(K):
    # u(t + sigma h) = u + h * Q @ (sigma, sigma^2, sigma^3, sigma^4)
    return K.T @ _P


def _dense_eval(u_old, h, Q, sigma):
    p = np.array([sigma, sigma ** 2, sigma ** 3, sigma ** 4])
    return u_old + h * (Q @ p)


def _classify(threshold: float, velocity: float) -> str:
    if threshold > 0:
        return ENTER_FLAT_FROM_RIGHT if velocity < 0 else EXIT_FLAT_RIGHT
    return ENTER_FLAT_FROM_LEFT if velocity > 0 else EXIT_FLAT_LEFT


def _scan_events(t_old, h, u_old, Q, events):
    """Locate |x| = 1 crossings inside one accepted step via dense output.

    A single large step may cross both thresholds (flat-region traversals),
    so candidates are collected first and appended in time order.
    """
    sigmas = np.linspace(0.0, 1.0, _EVENT_SUBDIVISIONS + 1)
    powers = np.vstack([sigmas, sigmas ** 2, sigmas ** 3, sigmas ** 4])
    xs = u_old[0] + h * (Q[0] @ powers)
    candidates = []
    for threshold in (1.0, -1.0):
        g = xs - threshold

        def gfun(sig, thr=threshold):
            return float(_dense_eval(u_old, h, Q, sig)[0]) - thr

        for i in range(_EVENT_SUBDIVISIONS):
            a, b = g[i], g[i + 1]
            if a == 0.0:
                sig = float(sigmas[i])
            elif a * b < 0.0:
                sig = float(brentq(gfun, sigmas[i], sigmas[i + 1], xtol=1e-14, rtol=1e-15))
            else:
                continue
            candidates.append((sig, threshold))
    for sig, threshold in sorted(candidates):
        t_e = t_old + sig * h
        v_e = float(_dense_eval(u_old, h, Q, sig)[1])
        if events and abs(t_e - events[-1].t) <= _EVENT_MERGE_WINDOW:
            continue
        events.append(Event(t=t_e, kind=_classify(threshold, v_e), velocity=v_e))


def integrate(oracle, cfg: OdeConfig, z_list, detect_unit_events: bool = False):
    """Integrate the damped dynamics, observing energies for each minimizer.

    Returns ``(trajectory, energy_records)`` where ``energy_records[j]`` is
    the list of per-accepted-step :class:`EnergyRecord` values for
    ``z_list[j]``.  Raises :class:`IntegrationError` on step-budget
    exhaustion, step-size underflow, or a non-finite state; the error's
    ``trajectory`` attribute holds the samples up to the failure point.
    """
    if cfg.x0.shape != (oracle.dim,):
        raise ValueError(f"x0 must have shape ({oracle.dim},)")
    try:
        initial_finite = (
            np.all(np.isfinite(cfg.x0))
            and np.all(np.isfinite(cfg.v0))
            and np.isfinite(oracle.gap(cfg.x0))
            and np.all(np.isfinite(oracle.gradient(cfg.x0)))
        )
    except (OverflowError, FloatingPointError):
        initial_finite = False
    if not initial_finite:
        raise IntegrationError("non-finite state at the initial point", at=cfg.t0)
    z_arrays = [np.asarray(z, dtype=float) for z in z_list]
    for z in z_arrays:
        if not oracle.is_minimizer(z):
            raise ValueError(f"z = {z} is not a minimizer of the oracle")
    if detect_unit_events and oracle.dim != 1:
        raise ValueError("unit-level event detection is defined for 1-D oracles")

    r = cfg.r
    n = oracle.dim
    gradient = oracle.gradient

    def rhs(t, u):
        x = u[:n]
        v = u[n:]
        out = np.empty_like(u)
        out[:n] = v
        out[n:] = -(r / t) * v - gradient(x)
        return out

    ts = [cfg.t0]
    xs = [cfg.x0.copy()]
    vs = [cfg.v0.copy()]
    events: list = []
    stats = StepStats()
    energies = [[] for _ in z_arrays]

    sub3 = 1.0 < r < 3.0

    def emit(t, x, v):
        osc = 0.5 * float(v @ v) + oracle.gap(x)
        for j, z in enumerate(z_arrays):
            if r == 3.0:
                e = energy_r3(t, x, v, z, oracle)
            else:
                e = _energy_general(t, x, v, z, r, oracle)
            f = energy_F(t, x, v, z, r, oracle) if sub3 else None
            energies[j].append(EnergyRecord(t=t, e_z=e, f_z=f, osc=osc))

    emit(cfg.t0, cfg.x0, cfg.v0)

    def finish():
        traj = ODETrajectory(
            ts=np.array(ts),
            xs=np.vstack(xs),
            vs=np.vstack(vs),
            events=events,
            step_stats=stats,
        )
        return traj, energies

    def fail(message, at):
        # samples end at the failure point; expose them on the error
        err = IntegrationError(message, at=at)
        err.trajectory = finish()[0]
        raise err

    if cfg.horizon == cfg.t0:
        return finish()

    t = cfg.t0
    u = np.concatenate([cfg.x0, cfg.v0])

    if t == 0.0:
        # removable singularity: a resting start has the series limit
        # V'(0+) = -grad f(X0) / (1 + r); bridge with one explicit micro-step
        g0 = gradient(cfg.x0)
        h_m = min(_MICRO_STEP, 0.5 * (cfg.horizon - cfg.t0))
        x1 = cfg.x0 - g0 * (h_m * h_m) / (2.0 * (1.0 + r))
        v1 = -g0 * h_m / (1.0 + r)
        t = h_m
        u = np.concatenate([x1, v1])
        ts.append(t)
        xs.append(x1.copy())
        vs.append(v1.copy())
        emit(t, x1, v1)
        stats.accepted += 1
        stats.min_step = min(stats.min_step, h_m)
        stats.max_step = max(stats.max_step, h_m)
        if t >= cfg.horizon:
            return finish()

    f_cur = rhs(t, u)
    if not np.all(np.isfinite(f_cur)):
        fail("non-finite state at the initial point", t)
    h = _initial_step(rhs, t, u, f_cur, cfg.rel_tol, cfg.abs_tol, cfg.horizon - t)
    err_prev = 1.0
    reject_streak = 0
    attempts = 0
    K = np.empty((7, 2 * n))

    while t < cfg.horizon:
        if h < _UNDERFLOW_FRACTION * cfg.horizon:
            fail(f"step size underflow (h = {h:g})", t)
        h_try = min(h, cfg.horizon - t)
        hit_end = h_try >= cfg.horizon - t - 1e-14 * max(1.0, cfg.horizon)
        attempts += 1
        if attempts > cfg.max_steps:
            fail("max_steps exceeded", t)

        try:
            K[0] = f_cur
            for s in range(1, 6):
                du = _A[s] @ K[:s]
                K[s] = rhs(t + _C[s] * h_try, u + h_try * du)
            u_new = u + h_try * (_B @ K[:6])
            t_new = cfg.horizon if hit_end else t + h_try
            K[6] = rhs(t_new, u_new)
        except (OverflowError, FloatingPointError):
            fail("non-finite state", t)

        scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(u), np.abs(u_new))
        err_vec = h_try * (_E @ K)
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))

        if not np.isfinite(err) or err > 1.0:
            stats.rejected += 1
            reject_streak += 1
            if np.isfinite(err):
                factor = max(_MIN_FACTOR, _SAFETY * err ** (-0.2))
            else:
                factor = _MIN_FACTOR
            h = h_try * min(1.0, factor)
            continue

        # accepted
        if detect_unit_events:
            _scan_events(t, h_try, u, _dense_coeffs(K), events)
        stats.accepted += 1
        stats.min_step = min(stats.min_step, h_try)
        stats.max_step = max(stats.max_step, h_try)
        t = t_new
        u = u_new
        f_cur = K[6].copy()
        ts.append(t)
        xs.append(u[:n].copy())
        vs.append(u[n:].copy())
        emit(t, u[:n], u[n:])

        if err == 0.0:
            factor = _MAX_FACTOR
        else:
            factor = _SAFETY * err ** (-_PI_ALPHA) * err_prev ** _PI_BETA
            factor = min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
        if reject_streak > 0:
            factor = min(1.0, factor)
        reject_streak = 0
        err_prev = max(err, 1e-10)
        h = h_try * factor

    return finish()


def run_counterexample(r: float, t0: float, horizon: float, rel_tol: float = 1e-9,
                       abs_tol: float = 1e-12, max_steps: int = 1_000_000) -> ODETrajectory:
    """Integrate the flat-bottomed 1-D objective from X(t0) = 2 at rest.

    For r in (0, 1] the trajectory keeps re-crossing |x| = 1; the returned
    trajectory carries the located crossing events in order.
    """
    if not (0.0 < r <= 1.0):
        raise ValueError("the divergent regime needs r in (0, 1]")
    if not t0 > 0:
        raise ValueError("t0 must be positive")
    oracle = make_counterexample_1d()
    cfg = OdeConfig(
        r=r,
        t0=t0,
        x0=np.array([2.0]),
        v0=np.array([0.0]),
        horizon=horizon,
        rel_tol=rel_tol,
        abs_tol=abs_tol,
        max_steps=max_steps,
    )
    traj, _ = integrate(oracle, cfg, [], detect_unit_events=True)
    return traj


def excursion_intervals(traj: ODETrajectory):
    """Maximal intervals with |x| > 1, from events when present, else samples.

    Leading and trailing partial excursions are included: a trajectory that
    starts outside the flat region opens an excursion at its first sample,
    and one still outside at the horizon closes at the horizon.
    """
    ts = np.asarray(traj.ts, dtype=float)
    xs = np.asarray(traj.xs, dtype=float).reshape(len(ts), -1)[:, 0]
    if traj.events:
        intervals = []
        start = ts[0] if abs(xs[0]) > 1.0 else None
        for ev in traj.events:
            if ev.kind in (ENTER_FLAT_FROM_RIGHT, ENTER_FLAT_FROM_LEFT):
                if start is not None:
                    intervals.append((start, ev.t))
                    start = None
            else:
                if start is None:
                    start = ev.t
        if start is not None:
            intervals.append((start, ts[-1]))
        return intervals

    outside = np.abs(xs) > 1.0
    intervals = []
    start = ts[0] if outside[0] else None
    for i in range(1, len(ts)):
        if outside[i] and start is None:
            # crossing between samples: interpolate on the side being crossed
            th = 1.0 if xs[i] > 0 else -1.0
            frac = (th - xs[i - 1]) / (xs[i] - xs[i - 1])
            start = ts[i - 1] + frac * (ts[i] - ts[i - 1])
        elif not outside[i] and start is not None:
            th = 1.0 if xs[i - 1] > 0 else -1.0
            frac = (th - xs[i - 1]) / (xs[i] - xs[i - 1])
            intervals.append((start, ts[i - 1] + frac * (ts[i] - ts[i - 1])))
            start = None
    if start is not None:
        intervals.append((start, ts[-1]))
    return intervals


def sturm_excursion_check(traj: ODETrajectory, r: float, tol: float = 1e-6) -> DiagnosticReport:
    """Every excursion outside [-1, 1] must last at most pi (+ tol).

    The transformed oscillation equation outside the flat region has a
    coefficient >= 1 for r in (0, 1], so zeros are spaced at most pi apart
    and no excursion can outlive pi.
    """
    intervals = excursion_intervals(traj)
    if not intervals:
        return make_report("sturm-excursion", 0.0, None, tol, notes="no excursions; vacuously true")
    durations = [b - a for a, b in intervals]
    worst = int(np.argmax(durations))
    violation = max(0.0, durations[worst] - math.pi)
    return make_report(
        "sturm-excursion",
        violation,
        float(intervals[worst][0]),
        tol,
        notes=f"max excursion duration {durations[worst]:.9f} over {len(intervals)} excursions",
    )
