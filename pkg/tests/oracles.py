"""Independent reference implementations used as test oracles.

Everything here deliberately avoids the library's own code paths: explicit
cofactor expansions instead of elimination, numpy's symmetric eigensolver
instead of minor tests, direct formula arithmetic instead of the builders.
"""
import math

import numpy as np


def det_cofactor(m) -> float:
    """Determinant by recursive cofactor expansion along the first row."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if n == 1:
        return float(m[0, 0])
    total = 0.0
    for j in range(n):
        sub = np.delete(np.delete(m, 0, axis=0), j, axis=1)
        total += ((-1.0) ** j) * m[0, j] * det_cofactor(sub)
    return total


def negdef_by_eigenvalues(block) -> bool:
    return bool(np.all(np.linalg.eigvalsh(np.asarray(block, dtype=float)) < 0.0))


def gamma_factor(speed: float, c: float = 1.0) -> float:
    return 1.0 / math.sqrt(1.0 - (speed / c) ** 2)


def acoustic_symbol(v, xi0, xi) -> float:
    """(xi0 + v . xi)^2 - |xi|^2 for the unit-density unit-speed acoustic metric."""
    v = np.asarray(v, dtype=float)
    xi = np.asarray(xi, dtype=float)
    return (xi0 + float(v @ xi)) ** 2 - float(xi @ xi)


def acoustic_xi0_roots(v, xi):
    """xi0 = -v.xi +/- |xi|, descending."""
    v = np.asarray(v, dtype=float)
    xi = np.asarray(xi, dtype=float)
    b = float(v @ xi)
    n = float(np.linalg.norm(xi))
    return (-b + n, -b - n)


def vortex_velocity(A, B, x):
    x = np.asarray(x, dtype=float)
    rr = float(x @ x)
    return np.array([(A * x[0] - B * x[1]) / rr, (A * x[1] + B * x[0]) / rr])


def vortex_delta(A, B, r) -> float:
    """Delta = 1 - (A^2 + B^2)/r^2 for the unit acoustic vortex."""
    return 1.0 - (A * A + B * B) / (r * r)


def random_hyperbolic(rng, n, cond_max=10.0):
    """Contravariant matrix with guaranteed (+,-,...,-) signature:
    L diag(1,-1,...,-1) L^T with a conditioned random L."""
    m = n + 1
    a = rng.standard_normal((m, m))
    u, s, vt = np.linalg.svd(a)
    s = np.linspace(1.0, cond_max ** 0.5, m)
    L = u @ np.diag(s) @ vt
    core = np.diag(np.concatenate([[1.0], -np.ones(n)]))
    return L @ core @ L.T


def polar_to_cartesian_tangent(x, dr, dtheta):
    """Cartesian vector of (dr/ds, dtheta/ds) at x: dr rhat + r dtheta thetahat."""
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    rhat = x / r
    that = np.array([-x[1], x[0]]) / r
    return dr * rhat + r * dtheta * that


def cross2(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def hausdorff(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
