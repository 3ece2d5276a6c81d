"""Momentum step-size sequences with validity certification.

The generated values are checked against their defining relations as they are
produced.  Tolerances on the quadratic relations are relative to t_k^2: the
recursions are exact in real arithmetic, but the float64 residual of the
closed-form root grows like eps * t_k^2.
"""

from __future__ import annotations

import math
import warnings

NAG_RECURSIVE = "nag_recursive"
NAG_LINEAR = "nag_linear"
OGM_RECURSIVE = "ogm_recursive"
CUSTOM = "custom"

_KINDS = (NAG_RECURSIVE, NAG_LINEAR, OGM_RECURSIVE, CUSTOM)

_REL_TOL = 1e-12
_GROWTH_TOL = 1e-12

# empirical divergence gate for custom sequences (t at index 100 should
# already exceed this if t_k -> infinity at a useful pace)
_DIVERGENCE_INDEX = 100
_DIVERGENCE_FLOOR = 10.0


def _next_root(prev: float) -> float:
    # positive root of s^2 - s = prev^2 (the negative root cannot yield a
    # nonnegative, diverging sequence)
    return 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * prev * prev))


class StepSequence:
    """Lazily generated momentum coefficients t_k (or theta_k).

    All kinds satisfy t_{-1} = 0 and t_0 = 1.  Values are validated as they
    are generated: the NAG inequality t_{k+1}^2 - t_{k+1} <= t_k^2, the OGM
    equality theta_{k+1}^2 - theta_{k+1} = theta_k^2, and the growth bound
    t_{k+1} <= t_k + 1.  Custom value lists are validated at construction and
    a warning is issued if they do not look divergent.
    """

    def __init__(self, kind: str, values=None):
        if kind not in _KINDS:
            raise ValueError(f"unknown sequence kind {kind!r}")
        self.kind = kind
        self._cursor = 0
        if kind == CUSTOM:
            if values is None or len(values) == 0:
                raise ValueError("custom sequences require an explicit value list")
            vals = [float(v) for v in values]
            self._values = vals
            self._validate_custom()
        else:
            if values is not None:
                raise ValueError("value lists are only accepted for custom sequences")
            self._values = [1.0]

    def _validate_custom(self):
        vals = self._values
        if abs(vals[0] - 1.0) > _REL_TOL:
            raise ValueError("custom sequence must start at t_0 = 1")
        for k in range(len(vals) - 1):
            tk, tk1 = vals[k], vals[k + 1]
            if tk1 < 0:
                raise ValueError(f"custom sequence negative at index {k + 1}")
            if tk1 * tk1 - tk1 > tk * tk + _REL_TOL * max(1.0, tk * tk):
                raise ValueError(
                    f"custom sequence violates t_(k+1)^2 - t_(k+1) <= t_k^2 at k={k}"
                )
            if tk1 > tk + 1.0 + _GROWTH_TOL:
                raise ValueError(f"custom sequence violates t_(k+1) <= t_k + 1 at k={k}")
        probe = min(_DIVERGENCE_INDEX, len(vals) - 1)
        if vals[probe] <= _DIVERGENCE_FLOOR:
            warnings.warn(
                "custom sequence does not look divergent "
                f"(t_{probe} = {vals[probe]:g} <= {_DIVERGENCE_FLOOR:g}); "
                "convergence guarantees need t_k -> infinity",
                stacklevel=3,
            )

    def _extend_to(self, k: int):
        vals = self._values
        if self.kind == CUSTOM:
            if k >= len(vals):
                raise IndexError(f"custom sequence has only {len(vals)} values")
            return
        while len(vals) <= k:
            prev = vals[-1]
            if self.kind == NAG_LINEAR:
                nxt = (len(vals) + 2) / 2.0
            else:
                nxt = _next_root(prev)
            rel = _REL_TOL * max(1.0, prev * prev)
            residual = nxt * nxt - nxt - prev * prev
            if self.kind == OGM_RECURSIVE and abs(residual) > rel:
                raise ArithmeticError(f"theta recursion residual {residual:g} at k={len(vals)}")
            if residual > rel:
                raise ArithmeticError(f"t-sequence validity violated at k={len(vals)}")
            if nxt > prev + 1.0 + _GROWTH_TOL:
                raise ArithmeticError(f"growth bound violated at k={len(vals)}")
            vals.append(nxt)

    def value(self, k: int) -> float:
        """t_k, with the convention t_{-1} = 0."""
        if k < -1:
            raise IndexError("sequence index must be >= -1")
        if k == -1:
            return 0.0
        self._extend_to(k)
        return self._values[k]

    def next(self) -> float:
        self._cursor += 1
        return self.value(self._cursor)


def seq_next(seq: StepSequence) -> float:
    """Advance the sequence cursor and return the next value."""
    return seq.next()
