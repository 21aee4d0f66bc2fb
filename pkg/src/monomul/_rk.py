"""Adaptive Dormand-Prince 5(4) stepping for complex-valued systems.

All components share one step size.  A trial step whose result fails the
``in_domain`` predicate is rejected and retried with half the step.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .exceptions import DomainExit, StepLimitExceeded

# Dormand-Prince tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4

MIN_STEP = 1e-14


def integrate(
    f: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    t_out,
    atol: float = 1e-10,
    rtol: float = 0.0,
    max_step: float = 1e-2,
    max_iter: int = 10**7,
    in_domain: Callable[[np.ndarray], np.ndarray] | None = None,
) -> np.ndarray:
    """Solve ``y' = f(t, y)`` from ``t = 0`` and return ``y`` at each of the
    nondecreasing times ``t_out`` (stacked along a new leading axis)."""
    t_out = np.asarray(t_out, dtype=float)
    if np.any(t_out < 0) or np.any(np.diff(t_out) < 0):
        raise ValueError("output times must be nonnegative and nondecreasing")
    y = np.array(y0, dtype=complex, copy=True)
    out = np.empty((t_out.size,) + y.shape, dtype=complex)
    t = 0.0
    h = min(max_step, 1e-3)
    iters = 0
    k1 = f(t, y)
    for idx, t_end in enumerate(t_out):
        while t < t_end:
            if iters >= max_iter:
                raise StepLimitExceeded(f"step limit {max_iter} reached at t={t:.6g}")
            iters += 1
            step = min(h, max_step, t_end - t)
            ks = [k1]
            for i in range(1, 7):
                yi = y + step * sum(a * k for a, k in zip(_A[i], ks))
                ks.append(f(t + _C[i] * step, yi))
            y_new = yi  # stage 7 argument is the 5th order solution (FSAL)
            err = step * sum(e * k for e, k in zip(_E, ks))
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            ratio = np.abs(err) / scale
            enorm = float(np.max(ratio)) if ratio.size else 0.0
            finite = np.all(np.isfinite(y_new))
            ok_domain = finite and (in_domain is None or bool(np.all(in_domain(y_new))))
            if finite and enorm <= 1.0 and ok_domain:
                t = t + step if step < t_end - t else t_end
                y = y_new
                k1 = ks[6]
                fac = 5.0 if enorm == 0 else min(5.0, max(0.2, 0.9 * enorm ** -0.2))
                h = min(max_step, step * fac)
            else:
                if not ok_domain or not finite:
                    h = step * 0.5
                else:
                    h = step * max(0.2, 0.9 * enorm ** -0.25)
                if h < MIN_STEP:
                    raise DomainExit(f"step size underflow at t={t:.6g}; trajectory leaves the domain")
        out[idx] = y
    return out
