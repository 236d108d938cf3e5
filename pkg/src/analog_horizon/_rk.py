"""Embedded Dormand-Prince 4(5) step primitives.

Clients (ray tracer, flow tracer, field-orbit integrator) write their own
driver loops around `dp_step`; event times are localized by bisecting the
size of a single trial step from the last accepted state, which keeps the
located event consistent with the numerically defined flow.
"""
from __future__ import annotations

import math

import numpy as np

# Butcher tableau, Dormand & Prince (1980); coefficients as exact rationals.
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# 5th-order minus embedded 4th-order weights (error estimator).
E1, E3, E4, E5, E6, E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40

MIN_STEP = 1e-14
MAX_GROW = 5.0
MAX_SHRINK = 0.2
SAFETY = 0.9


def dp_step(f, s, y, h, k1=None):
    """One trial DP45 step from (s, y) of size h.

    Returns (y_new, err_vec, k1, k7); k7 is the derivative at the new point
    (FSAL: reusable as k1 of the next step).
    """
    if k1 is None:
        k1 = f(s, y)
    k2 = f(s + C2 * h, y + h * (A21 * k1))
    k3 = f(s + C3 * h, y + h * (A31 * k1 + A32 * k2))
    k4 = f(s + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3))
    k5 = f(s + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))
    k6 = f(s + h, y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5))
    y_new = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
    k7 = f(s + h, y_new)
    err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)
    return y_new, err, k1, k7


def error_norm(err, y_old, y_new, rel_tol, abs_tol) -> float:
    scale = abs_tol + rel_tol * np.maximum(np.abs(y_old), np.abs(y_new))
    ratio = err / scale
    return float(np.sqrt(np.mean(ratio * ratio)))


def next_step_size(h, errn) -> float:
    if errn == 0.0 or not math.isfinite(errn):
        factor = MAX_GROW if errn == 0.0 else MAX_SHRINK
    else:
        factor = min(MAX_GROW, max(MAX_SHRINK, SAFETY * errn ** -0.2))
    return h * factor


def initial_step_size(f, s, y, rel_tol, abs_tol, direction=1.0) -> float:
    """Hairer-style h0 heuristic; tolerant of zero initial derivative."""
    f0 = f(s, y)
    d0 = float(np.linalg.norm(y))
    d1 = float(np.linalg.norm(f0))
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    y1 = y + direction * h0 * f0
    f1 = f(s + direction * h0, y1)
    d2 = float(np.linalg.norm(f1 - f0)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100.0 * h0, h1)


def bisect_event(f, s, y, h_max, k1, test, tol_s):
    """Locate the smallest step h* in (0, h_max] where `test` first flips sign.

    `test(y)` must be negative at y (event not yet reached) and non-negative
    at the state reached by a single trial step of size h_max. Bisects on the
    trial-step size; returns (h*, y*). The single-step truncation error over
    h <= h_max is far below tol_s for the step sizes the controller accepts.
    """
    lo, hi = 0.0, h_max
    y_hi, _, _, _ = dp_step(f, s, y, h_max, k1)
    for _ in range(200):
        if hi - lo <= tol_s:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        y_mid, _, _, _ = dp_step(f, s, y, mid, k1)
        if test(y_mid) >= 0.0:
            hi, y_hi = mid, y_mid
        else:
            lo = mid
    return hi, y_hi
