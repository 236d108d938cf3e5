"""Pseudo-Riemannian metric algebra for stationary metrics of moving media.

The central object is `MetricField`: the contravariant components g^{jk}(x),
j,k = 0..n (0 = time), as a function of the spatial point only. All analysis
modules consume it through the operations here: inversion, the spatial-block
determinant Delta, signature and hyperbolicity audits, characteristic tests,
time-like tests, and gauge pullbacks.

Matrix sizes never exceed 4x4, so inversion and determinants use in-house
Gaussian elimination with partial pivoting; the eigenvalue cross-checks go
through numpy's symmetric solver so the two routes stay independent.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NotHyperbolic, ComplexRoots, SingularJacobian, SingularMetric

DET_FLOOR = 1e-14
MINOR_TIE_TOL = 1e-12


def gauss_invert(mat):
    """Invert a small matrix by Gaussian elimination with partial pivoting.

    Returns (inverse, determinant). Raises SingularMetric when |det| <= 1e-14.
    """
    a = np.array(mat, dtype=float)
    m = a.shape[0]
    inv = np.eye(m)
    det = 1.0
    for col in range(m):
        pivot_row = col + int(np.argmax(np.abs(a[col:, col])))
        if pivot_row != col:
            a[[col, pivot_row]] = a[[pivot_row, col]]
            inv[[col, pivot_row]] = inv[[pivot_row, col]]
            det = -det
        pivot = a[col, col]
        det *= pivot
        if pivot == 0.0:
            raise SingularMetric("zero pivot in metric inversion")
        a[col] /= pivot
        inv[col] /= pivot
        for row in range(m):
            if row != col and a[row, col] != 0.0:
                factor = a[row, col]
                a[row] -= factor * a[col]
                inv[row] -= factor * inv[col]
    if abs(det) <= DET_FLOOR:
        raise SingularMetric(f"|det| = {abs(det):.3e} <= {DET_FLOOR:.0e}")
    return inv, det


def small_det(mat) -> float:
    """Determinant by elimination with partial pivoting (sizes <= 4)."""
    a = np.array(mat, dtype=float)
    m = a.shape[0]
    det = 1.0
    for col in range(m):
        pivot_row = col + int(np.argmax(np.abs(a[col:, col])))
        if pivot_row != col:
            a[[col, pivot_row]] = a[[pivot_row, col]]
            det = -det
        pivot = a[col, col]
        if pivot == 0.0:
            return 0.0
        det *= pivot
        a[col + 1:] -= np.outer(a[col + 1:, col] / pivot, a[col])
    return det


def make_fd_grad(eval_fn, dim: int, h: float) -> Callable[[np.ndarray], np.ndarray]:
    """Central-difference gradient of a matrix-valued field, step h per axis."""

    def grad(x):
        x = np.asarray(x, dtype=float)
        out = []
        for p in range(dim):
            e = np.zeros(dim)
            e[p] = h
            out.append((eval_fn(x + e) - eval_fn(x - e)) / (2.0 * h))
        return np.stack(out, axis=0)

    return grad


@dataclass(frozen=True)
class MetricField:
    """Stationary contravariant metric g^{jk}(x), indices 0..dim (0 = time).

    eval: x (dim,) -> symmetric (dim+1, dim+1) array
    grad: x (dim,) -> (dim, dim+1, dim+1) array of d g^{jk} / d x_p
    domain: region descriptor with `contains`, `inside`, `diameter`
    """
    dim: int
    eval: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    domain: object
    name: str = "metric"


@dataclass(frozen=True)
class SignatureReport:
    g00_upper: float
    g00_lower: float
    delta: float
    spatial_negdef: bool
    spatial_degenerate: bool
    cond_1_2: bool
    prop11_agrees: bool
    full_eigenvalues: np.ndarray
    spatial_eigenvalues: np.ndarray


def full_metric(m: MetricField, x) -> np.ndarray:
    """Covariant metric g_{jk}(x): inverse of the contravariant matrix."""
    inv, _ = gauss_invert(m.eval(np.asarray(x, dtype=float)))
    return inv


def spatial_delta(m: MetricField, x) -> float:
    """Delta(x): determinant of the spatial block g^{jk}, j,k = 1..n."""
    return small_det(m.eval(np.asarray(x, dtype=float))[1:, 1:])


def lower_g00(m: MetricField, x) -> float:
    """g_{00}(x) via the cofactor ratio Delta(x) / det g^{jk}."""
    g_up = m.eval(np.asarray(x, dtype=float))
    det = small_det(g_up)
    if abs(det) <= DET_FLOOR:
        raise SingularMetric(f"|det| = {abs(det):.3e} <= {DET_FLOOR:.0e}")
    return small_det(g_up[1:, 1:]) / det


def _negdef_by_minors(block) -> tuple[bool, bool]:
    """(negative definite, degenerate) via alternating leading principal minors."""
    n = block.shape[0]
    negdef = True
    degenerate = False
    for k in range(1, n + 1):
        minor = small_det(block[:k, :k])
        signed = minor * (-1.0) ** k
        if abs(minor) <= MINOR_TIE_TOL:
            degenerate = True
            negdef = False
        elif signed <= 0.0:
            negdef = False
    return negdef, degenerate


def signature_report(m: MetricField, x) -> SignatureReport:
    """Signature audit at x; raises NotHyperbolic off the (+,-,...,-) stratum."""
    g_up = m.eval(np.asarray(x, dtype=float))
    full_eig = np.linalg.eigvalsh(g_up)
    n_pos = int(np.sum(full_eig > 0))
    n_neg = int(np.sum(full_eig < 0))
    if n_pos != 1 or n_neg != m.dim:
        raise NotHyperbolic(
            f"eigenvalues {full_eig} are not (+," + "-," * (m.dim - 1) + "-)")
    block = g_up[1:, 1:]
    spatial_eig = np.linalg.eigvalsh(block)
    negdef, degenerate = _negdef_by_minors(block)
    delta = small_det(block)
    g00_low = delta / small_det(g_up)
    return SignatureReport(
        g00_upper=float(g_up[0, 0]),
        g00_lower=g00_low,
        delta=delta,
        spatial_negdef=negdef,
        spatial_degenerate=degenerate,
        cond_1_2=bool(g_up[0, 0] > 0.0),
        prop11_agrees=bool(negdef == (g00_low > MINOR_TIE_TOL)),
        full_eigenvalues=full_eig,
        spatial_eigenvalues=spatial_eig,
    )


def characteristic_residual(m: MetricField, x, nu) -> float:
    """Spatial quadratic form sum g^{jk} nu_j nu_k; zero on characteristics."""
    nu = np.asarray(nu, dtype=float)
    block = m.eval(np.asarray(x, dtype=float))[1:, 1:]
    return float(nu @ block @ nu)


def full_symbol(m: MetricField, x, xi0: float, xi) -> float:
    """Full quadratic form sum g^{jk} xi_j xi_k over indices 0..n."""
    xi_full = np.concatenate([[xi0], np.asarray(xi, dtype=float)])
    g_up = m.eval(np.asarray(x, dtype=float))
    return float(xi_full @ g_up @ xi_full)


def solve_xi0(m: MetricField, x, xi_spatial) -> tuple[float, float]:
    """Both xi0 roots of the dispersion quadratic, ordered descending.

    g^{00} xi0^2 + 2 (sum g^{0j} xi_j) xi0 + sum g^{jk} xi_j xi_k = 0.
    """
    xi = np.asarray(xi_spatial, dtype=float)
    if not np.any(xi != 0.0):
        raise ComplexRoots("zero spatial covector")
    g_up = m.eval(np.asarray(x, dtype=float))
    a = g_up[0, 0]
    b = float(g_up[0, 1:] @ xi)          # half the linear coefficient
    c = float(xi @ g_up[1:, 1:] @ xi)
    disc = b * b - a * c
    if disc < 0.0:
        raise ComplexRoots(f"discriminant {disc:.3e} < 0")
    sq = np.sqrt(disc)
    if b >= 0.0:
        q = -(b + sq)
    else:
        q = -(b - sq)
    if q == 0.0:
        return (0.0, 0.0)
    r1, r2 = q / a, c / q
    return (max(r1, r2), min(r1, r2))


def is_timelike(m: MetricField, x, xdot) -> bool:
    """True iff sum g_{jk} xdot^j xdot^k > 0 and xdot^0 > 0."""
    xdot = np.asarray(xdot, dtype=float)
    g_low = full_metric(m, x)
    return bool(xdot @ g_low @ xdot > 0.0 and xdot[0] > 0.0)


@dataclass(frozen=True)
class GaugeTransform:
    """Change of variables y0 = x0 + a(x), y = phi(x), identity on a boundary set.

    phi must be a diffeomorphism of the domain; phi_inv its inverse map.
    """
    a: Callable[[np.ndarray], float]
    a_grad: Callable[[np.ndarray], np.ndarray]
    phi: Callable[[np.ndarray], np.ndarray]
    phi_jacobian: Callable[[np.ndarray], np.ndarray]
    phi_inv: Callable[[np.ndarray], np.ndarray]

    @staticmethod
    def identity(dim: int) -> "GaugeTransform":
        return GaugeTransform(
            a=lambda x: 0.0,
            a_grad=lambda x: np.zeros(dim),
            phi=lambda x: np.asarray(x, dtype=float).copy(),
            phi_jacobian=lambda x: np.eye(dim),
            phi_inv=lambda y: np.asarray(y, dtype=float).copy(),
        )


def gauge_jacobian(t: GaugeTransform, x) -> np.ndarray:
    """(n+1)x(n+1) Jacobian of (x0, x) -> (x0 + a(x), phi(x)).

    Top row (1, a_x); lower-left block is zero because phi is independent of
    the time coordinate.
    """
    x = np.asarray(x, dtype=float)
    dphi = np.asarray(t.phi_jacobian(x), dtype=float)
    n = dphi.shape[0]
    jac = np.zeros((n + 1, n + 1))
    jac[0, 0] = 1.0
    jac[0, 1:] = t.a_grad(x)
    jac[1:, 1:] = dphi
    return jac


def pullback_metric(m: MetricField, t: GaugeTransform,
                    new_domain: Optional[object] = None,
                    fd_step: Optional[float] = None) -> MetricField:
    """Transformed contravariant field g~^{jk}(y) = J g^{jk} J^T at x = phi^-1(y).

    The returned field's gradient is computed by central finite differences
    (step 1e-5 x domain diameter unless overridden). Default domain is the
    original one, valid for boundary-fixing transforms.
    """
    domain = new_domain if new_domain is not None else m.domain
    h = fd_step if fd_step is not None else 1e-5 * domain.diameter

    def eval_y(y):
        x = np.asarray(t.phi_inv(np.asarray(y, dtype=float)), dtype=float)
        jac = gauge_jacobian(t, x)
        if abs(small_det(jac)) <= DET_FLOOR:
            raise SingularJacobian(f"Jacobian singular at x = {x}")
        return jac @ m.eval(x) @ jac.T

    return MetricField(
        dim=m.dim,
        eval=eval_y,
        grad=make_fd_grad(eval_y, m.dim, h),
        domain=domain,
        name=f"{m.name}:pullback",
    )


def transform_covector(t: GaugeTransform, x, xi0: float, xi):
    """Covector transport (xi0, xi) -> (xi0, (J^T)^-1 (xi0, xi)) under the gauge map."""
    jac = gauge_jacobian(t, x)
    inv_t, _ = gauss_invert(jac.T)
    out = inv_t @ np.concatenate([[xi0], np.asarray(xi, dtype=float)])
    return float(out[0]), out[1:]
