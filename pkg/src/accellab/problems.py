"""Smooth convex test objectives with known minimizer structure.

Every oracle carries its gradient Lipschitz constant, its minimum value and
at least one explicit minimizer, so that energy functions and rate bounds can
be evaluated exactly along method iterates and ODE trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

SINGLE_POINT = "single_point"
BOUNDED_SET = "bounded_set"
UNBOUNDED_SET = "unbounded_set"

_ARGMIN_KINDS = (SINGLE_POINT, BOUNDED_SET, UNBOUNDED_SET)

# absolute slack allowed when certifying a declared minimizer
_VALUE_ATOL = 1e-12
_GRAD_ATOL = 1e-10


def as_point(x, dim: int) -> np.ndarray:
    """Coerce scalar/sequence input to a float vector of the given length."""
    p = np.atleast_1d(np.asarray(x, dtype=float))
    if p.shape != (dim,):
        raise ValueError(f"expected a point of dimension {dim}, got shape {p.shape}")
    return p


def _frozen(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class ObjectiveOracle:
    """An L-smooth convex objective with explicit minimizer metadata.

    Attributes
    ----------
    dim : ambient dimension n
    value : x -> f(x)
    gradient : x -> grad f(x)
    lipschitz : gradient Lipschitz constant L > 0
    fstar : minimum value of f
    argmin_kind : one of ``single_point``, ``bounded_set``, ``unbounded_set``
    known_minimizers : points z with f(z) == fstar

    Oracles are immutable and their callables must be pure, so a single
    oracle may be evaluated from many threads concurrently.
    """

    dim: int
    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    lipschitz: float
    fstar: float
    argmin_kind: str
    known_minimizers: tuple
    gap_fn: Callable[[np.ndarray], float] | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not self.lipschitz > 0:
            raise ValueError("lipschitz must be positive")
        if self.argmin_kind not in _ARGMIN_KINDS:
            raise ValueError(f"unknown argmin_kind {self.argmin_kind!r}")
        mins = tuple(_frozen(as_point(z, self.dim)) for z in self.known_minimizers)
        object.__setattr__(self, "known_minimizers", mins)
        for z in mins:
            if abs(float(self.value(z)) - self.fstar) > _VALUE_ATOL:
                raise ValueError(f"declared minimizer {z} does not attain fstar")
            if float(np.linalg.norm(self.gradient(z))) > _GRAD_ATOL:
                raise ValueError(f"gradient does not vanish at declared minimizer {z}")

    def gap(self, x) -> float:
        """f(x) - fstar, computed without cancellation where possible.

        Energy functions multiply this difference by factors as large as
        t_k^2, so an absolute eps*|fstar| rounding error in the naive
        subtraction would swamp the monotonicity tolerances.  Oracle
        constructors that know a cancellation-free form install it here.
        """
        if self.gap_fn is not None:
            return float(self.gap_fn(x))
        return float(self.value(x)) - self.fstar

    def is_minimizer(self, z, value_tol: float = 1e-10, grad_tol: float = 1e-8) -> bool:
        """Whether z attains fstar with a vanishing gradient, within tolerance."""
        z = as_point(z, self.dim)
        scale = max(1.0, abs(self.fstar))
        return (
            abs(float(self.value(z)) - self.fstar) <= value_tol * scale
            and float(np.linalg.norm(self.gradient(z))) <= grad_tol
        )


@dataclass(frozen=True)
class ProblemCatalogEntry:
    id: str
    oracle: ObjectiveOracle
    notes: str


def make_quadratic(A, b, lipschitz: float | None = None) -> ObjectiveOracle:
    """Quadratic oracle f(x) = 1/2 x'Ax - b'x for symmetric PSD A.

    The Lipschitz constant defaults to the largest eigenvalue of A; an
    explicit ``lipschitz`` may declare a looser (larger) constant, which is
    also the only way to build a constant objective (A = 0, b = 0).

    Rejects non-symmetric A, indefinite A, and b outside the range of A
    (such an f is unbounded below).
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be a square matrix")
    n = A.shape[0]
    if b.shape != (n,):
        raise ValueError("b must be a vector matching A")
    scale = max(1.0, float(np.abs(A).max(initial=0.0)))
    if float(np.abs(A - A.T).max(initial=0.0)) > 1e-12 * scale:
        raise ValueError("A must be symmetric")

    w, V = np.linalg.eigh(A)
    w_max = float(w[-1])
    cutoff = 1e-12 * max(1.0, w_max)
    if float(w[0]) < -cutoff:
        raise ValueError("A must be positive semidefinite")
    w = np.clip(w, 0.0, None)
    null = w <= cutoff

    c = V.T @ b
    if np.any(np.abs(c[null]) > 1e-10 * max(1.0, float(np.linalg.norm(b)))):
        raise ValueError("b is not in the range of A; the objective is unbounded below")

    coef = np.zeros(n)
    coef[~null] = c[~null] / w[~null]
    x_sol = V @ coef

    if lipschitz is None:
        if w_max <= cutoff:
            raise ValueError("A has no positive eigenvalue; pass an explicit lipschitz")
        lipschitz = w_max
    elif lipschitz < w_max - 1e-12 * max(1.0, w_max):
        raise ValueError("declared lipschitz is below the largest eigenvalue of A")

    A = _frozen(A)
    b = _frozen(b)

    def value(x):
        x = np.asarray(x, dtype=float)
        return float(0.5 * (x @ (A @ x)) - b @ x)

    def gradient(x):
        x = np.asarray(x, dtype=float)
        return A @ x - b

    def gap_fn(x):
        # f(x) - fstar == 1/2 (x - x_sol)' A (x - x_sol) since A x_sol = b;
        # this form has no additive constant to cancel against
        d = np.asarray(x, dtype=float) - x_sol
        return 0.5 * float(d @ (A @ d))

    minimizers = [x_sol]
    if np.any(null):
        # a nontrivial nullspace makes argmin an affine subspace; record a few
        # distinct minimizers so two-minimizer diagnostics have material
        v0 = V[:, int(np.argmax(null))]
        minimizers.extend([x_sol + v0, x_sol - v0])
        kind = UNBOUNDED_SET
    else:
        kind = SINGLE_POINT

    return ObjectiveOracle(
        dim=n,
        value=value,
        gradient=gradient,
        lipschitz=float(lipschitz),
        fstar=value(x_sol),
        argmin_kind=kind,
        known_minimizers=tuple(minimizers),
        gap_fn=gap_fn,
    )


def make_counterexample_1d() -> ObjectiveOracle:
    """Flat-bottomed piecewise quadratic on the line.

    f(x) = 1/2 (x-1)^2 for x > 1, zero on [-1, 1], 1/2 (x+1)^2 for x < -1.
    C^1 with a globally 1-Lipschitz derivative; argmin is the segment
    [-1, 1], so trajectories may keep visiting both endpoints forever.
    """

    def value(x):
        t = float(np.atleast_1d(x)[0])
        if t > 1.0:
            return 0.5 * (t - 1.0) ** 2
        if t < -1.0:
            return 0.5 * (t + 1.0) ** 2
        return 0.0

    def gradient(x):
        t = float(np.atleast_1d(x)[0])
        if t > 1.0:
            g = t - 1.0
        elif t < -1.0:
            g = t + 1.0
        else:
            g = 0.0
        return np.array([g])

    return ObjectiveOracle(
        dim=1,
        value=value,
        gradient=gradient,
        lipschitz=1.0,
        fstar=0.0,
        argmin_kind=BOUNDED_SET,
        known_minimizers=(np.array([-1.0]), np.array([0.0]), np.array([1.0])),
    )


def make_segment_argmin_2d() -> ObjectiveOracle:
    """2-D objective whose argmin is the segment [-1, 1] x {0}.

    f(x1, x2) = 1/2 max(|x1| - 1, 0)^2 + 1/2 x2^2.  Useful stress test for
    uniqueness-of-limit checks: several distinct minimizers are available as
    candidate cluster points.
    """

    def value(x):
        x = np.asarray(x, dtype=float)
        e = max(abs(float(x[0])) - 1.0, 0.0)
        return 0.5 * e * e + 0.5 * float(x[1]) ** 2

    def gradient(x):
        x = np.asarray(x, dtype=float)
        x1 = float(x[0])
        e = max(abs(x1) - 1.0, 0.0)
        g1 = np.sign(x1) * e
        return np.array([g1, float(x[1])])

    return ObjectiveOracle(
        dim=2,
        value=value,
        gradient=gradient,
        lipschitz=1.0,
        fstar=0.0,
        argmin_kind=BOUNDED_SET,
        known_minimizers=(
            np.array([-1.0, 0.0]),
            np.array([0.0, 0.0]),
            np.array([1.0, 0.0]),
        ),
    )


def random_quadratic(n: int, seed: int) -> tuple[ObjectiveOracle, np.ndarray]:
    """Seeded random PD quadratic plus a deterministic start point.

    Eigenvalues are log-uniform in [1e-2, 1] and the basis is the Q factor
    of a seeded Gaussian matrix, so conditioning is controlled and the true
    Lipschitz constant is known exactly.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    eigs = 10.0 ** rng.uniform(-2.0, 0.0, size=n)
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    A = (Q * eigs) @ Q.T
    A = 0.5 * (A + A.T)
    x_target = rng.normal(size=n)
    b = A @ x_target
    x0 = x_target + rng.normal(size=n)
    return make_quadratic(A, b), x0


def check_convexity_inequality(oracle: ObjectiveOracle, x, y) -> float:
    """Slack f(y) - f(x) - <grad f(x), y - x>; nonnegative for convex f."""
    x = as_point(x, oracle.dim)
    y = as_point(y, oracle.dim)
    return float(oracle.value(y) - oracle.value(x) - oracle.gradient(x) @ (y - x))


def check_cocoercivity(oracle: ObjectiveOracle, x, y) -> float:
    """Slack of the cocoercivity inequality for L-smooth convex f.

    Returns f(y) - f(x) - <grad f(x), y - x> - ||grad f(y) - grad f(x)||^2 / (2L),
    which is nonnegative when the oracle is genuinely L-smooth and convex.
    """
    x = as_point(x, oracle.dim)
    y = as_point(y, oracle.dim)
    gx = oracle.gradient(x)
    gy = oracle.gradient(y)
    lin = float(oracle.value(y) - oracle.value(x) - gx @ (y - x))
    return lin - float((gy - gx) @ (gy - gx)) / (2.0 * oracle.lipschitz)


def check_gradient_fd(oracle: ObjectiveOracle, x, h: float) -> float:
    """Max componentwise deviation of gradient(x) from a central difference."""
    if not h > 0:
        raise ValueError("h must be positive")
    x = as_point(x, oracle.dim)
    g = oracle.gradient(x)
    err = 0.0
    for i in range(oracle.dim):
        e = np.zeros(oracle.dim)
        e[i] = h
        fd = (oracle.value(x + e) - oracle.value(x - e)) / (2.0 * h)
        err = max(err, abs(fd - float(g[i])))
    return err


# Built-in catalog.  Each entry records the constructor kind and parameters
# so the catalog can be serialized, plus a canonical start point for runs.
_CATALOG = {
    "quad-iso": dict(
        kind="quadratic",
        params=dict(A=[[1.0, 0.0], [0.0, 1.0]], b=[0.0, 0.0]),
        start=[1.0, 0.0],
        notes="isotropic quadratic, single minimizer at the origin",
    ),
    "quad-diag": dict(
        kind="quadratic",
        params=dict(A=[[3.0, 0.0], [0.0, 1.0]], b=[3.0, 2.0]),
        start=[0.0, 0.0],
        notes="anisotropic quadratic with a shifted unique minimizer",
    ),
    "quad-degenerate": dict(
        kind="quadratic",
        params=dict(A=[[2.0, 0.0], [0.0, 0.0]], b=[0.0, 0.0]),
        start=[2.0, 3.0],
        notes="singular quadratic; argmin is the whole x2-axis (unbounded)",
    ),
    "segment2d": dict(
        kind="segment_argmin_2d",
        params=dict(),
        start=[2.0, 3.0],
        notes="argmin is the segment [-1,1] x {0}; limit-uniqueness stress test",
    ),
    "counterexample": dict(
        kind="counterexample_1d",
        params=dict(),
        start=[2.0],
        notes="flat-bottomed 1-D piecewise quadratic; argmin [-1, 1]",
    ),
}

_BUILDERS = {
    "quadratic": lambda p: make_quadratic(p["A"], p["b"]),
    "segment_argmin_2d": lambda p: make_segment_argmin_2d(),
    "counterexample_1d": lambda p: make_counterexample_1d(),
}


def catalog_ids() -> list[str]:
    return list(_CATALOG)


def get_catalog_entry(problem_id: str) -> ProblemCatalogEntry:
    try:
        meta = _CATALOG[problem_id]
    except KeyError:
        raise KeyError(f"unknown problem id {problem_id!r}; known: {sorted(_CATALOG)}")
    oracle = _BUILDERS[meta["kind"]](meta["params"])
    return ProblemCatalogEntry(id=problem_id, oracle=oracle, notes=meta["notes"])


def built_in_catalog() -> list[ProblemCatalogEntry]:
    return [get_catalog_entry(pid) for pid in _CATALOG]


def default_start(problem_id: str) -> np.ndarray:
    return np.array(_CATALOG[problem_id]["start"], dtype=float)


def catalog_to_json() -> list[dict]:
    """JSON-ready description of the built-in catalog."""
    out = []
    for entry in built_in_catalog():
        meta = _CATALOG[entry.id]
        out.append(
            {
                "id": entry.id,
                "kind": meta["kind"],
                "params": meta["params"],
                "L": entry.oracle.lipschitz,
                "fstar": entry.oracle.fstar,
                "minimizers": [list(map(float, z)) for z in entry.oracle.known_minimizers],
            }
        )
    return out
