# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: small-matrix covariance propagation and metrics.

Same API as pondera._reference; selected at import by pondera.kernels.
Everything here works on matrices of dimension 4+2N with N a handful of
mechanical modes, so dense Gauss-Jordan elimination is the right tool.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cosh, exp, fabs, log, sinh, sqrt

cnp.import_array()

ctypedef double complex dcomplex

# eta^2 - 4 det V is nonnegative for any positive-definite symmetric matrix,
# so small negatives are rounding noise (clamped); only clearly indefinite
# inputs raise.
DEF DISC_TOL = 1e-8


def transfer_matrix(double[:, ::1] K, double omega, double gamma_c):
    """4 x dim optical transfer matrix sqrt(2 gc) M[optical rows] + D."""
    cdef Py_ssize_t n = K.shape[0]
    cdef cnp.ndarray[dcomplex, ndim=2] aug = np.zeros((n, 2 * n), dtype=np.complex128)
    cdef dcomplex[:, ::1] a = aug
    cdef Py_ssize_t i, j, col, piv
    cdef double best, mag
    cdef dcomplex factor, pivval
    for i in range(n):
        for j in range(n):
            a[i, j] = K[i, j]
        a[i, i] = a[i, i] + 1j * omega
        a[i, n + i] = 1.0
    # Gauss-Jordan with partial pivoting on the augmented [A | I]
    for col in range(n):
        piv = col
        best = fabs(a[col, col].real) + fabs(a[col, col].imag)
        for i in range(col + 1, n):
            mag = fabs(a[i, col].real) + fabs(a[i, col].imag)
            if mag > best:
                best = mag
                piv = i
        if best == 0.0:
            raise ValueError(f"response matrix singular at omega = {omega!r} rad/s")
        if piv != col:
            for j in range(2 * n):
                factor = a[col, j]
                a[col, j] = a[piv, j]
                a[piv, j] = factor
        pivval = a[col, col]
        for j in range(2 * n):
            a[col, j] = a[col, j] / pivval
        for i in range(n):
            if i == col:
                continue
            factor = a[i, col]
            if factor != 0:
                for j in range(2 * n):
                    a[i, j] = a[i, j] - factor * a[col, j]
    cdef cnp.ndarray[dcomplex, ndim=2] out = np.empty((4, n), dtype=np.complex128)
    cdef dcomplex[:, ::1] t = out
    cdef double s2g = sqrt(2.0 * gamma_c)
    for i in range(4):
        for j in range(n):
            t[i, j] = s2g * a[i, n + j]
        t[i, i] = t[i, i] + 1.0 / s2g
    if not np.all(np.isfinite(out.view(np.float64))):
        raise ValueError(f"response matrix ill-conditioned at omega = {omega!r} rad/s")
    return out


def output_cov(dcomplex[:, ::1] t, dcomplex[:, ::1] g):
    """Symmetrized real output covariance Re(T G T^dag)."""
    cdef Py_ssize_t n = t.shape[1]
    cdef Py_ssize_t i, j, k
    cdef dcomplex acc
    cdef dcomplex[4][16] w  # T @ G rows, n <= 16 supported by the compiled path
    if n > 16:
        raise ValueError("compiled kernel supports at most 6 mechanical modes")
    for i in range(4):
        for j in range(n):
            acc = 0
            for k in range(n):
                acc = acc + t[i, k] * g[k, j]
            w[i][j] = acc
    cdef cnp.ndarray[double, ndim=2] out = np.empty((4, 4))
    cdef double[:, ::1] v = out
    cdef double re
    for i in range(4):
        for j in range(4):
            acc = 0
            for k in range(n):
                acc = acc + w[i][k] * t[j, k].conjugate()
            v[i, j] = acc.real
    for i in range(4):
        for j in range(i + 1, 4):
            re = 0.5 * (v[i, j] + v[j, i])
            v[i, j] = re
            v[j, i] = re
    return out


cdef inline double _det2(double a, double b, double c, double d) noexcept nogil:
    return a * d - b * c


cdef double _det4(double[:, ::1] v) noexcept nogil:
    # LU with partial pivoting: much better conditioned than cofactor
    # expansion for the strongly anisotropic covariances met in sweeps
    cdef double a[4][4]
    cdef Py_ssize_t i, j, col, piv
    cdef double det = 1.0
    cdef double best, mag, factor
    for i in range(4):
        for j in range(4):
            a[i][j] = v[i, j]
    for col in range(4):
        piv = col
        best = fabs(a[col][col])
        for i in range(col + 1, 4):
            mag = fabs(a[i][col])
            if mag > best:
                best = mag
                piv = i
        if best == 0.0:
            return 0.0
        if piv != col:
            det = -det
            for j in range(4):
                factor = a[col][j]
                a[col][j] = a[piv][j]
                a[piv][j] = factor
        det *= a[col][col]
        for i in range(col + 1, 4):
            factor = a[i][col] / a[col][col]
            for j in range(col + 1, 4):
                a[i][j] -= factor * a[col][j]
    return det


cdef inline void _pt_invariants(double[:, ::1] v, double* eta, double* det) noexcept nogil:
    cdef double a = _det2(v[0, 0], v[0, 1], v[1, 0], v[1, 1])
    cdef double b = _det2(v[2, 2], v[2, 3], v[3, 2], v[3, 3])
    cdef double c = _det2(v[0, 2], v[0, 3], v[1, 2], v[1, 3])
    eta[0] = a + b - 2.0 * c
    det[0] = _det4(v)


def logneg(double[:, ::1] V):
    """(log negativity, minimal PT symplectic eigenvalue) of a 4x4 covariance."""
    cdef double eta, det, disc, root, nu2, nu, scale
    _pt_invariants(V, &eta, &det)
    disc = eta * eta - 4.0 * det
    scale = max(1.0, eta * eta, fabs(4.0 * det))
    if disc < -DISC_TOL * scale:
        raise ValueError(f"unphysical covariance: eta^2 < 4 det V (eta={eta}, det={det})")
    if disc < 0.0:
        disc = 0.0
    root = sqrt(disc)
    # stable smaller quadratic root: avoids the eta - sqrt(...) cancellation
    if eta + root > 0.0:
        nu2 = 2.0 * det / (eta + root)
    else:
        nu2 = (eta - root) / 2.0
    if nu2 < 0.0:
        nu2 = 0.0
    nu = sqrt(nu2)
    if nu <= 0.0:
        raise ValueError("degenerate partial-transpose spectrum (nu_minus = 0)")
    cdef double en = -log(2.0 * nu)
    return (en if en > 0.0 else 0.0), nu


def symplectic_pair(double[:, ::1] V):
    """(nu_minus, nu_plus) of a two-mode covariance."""
    cdef double a = _det2(V[0, 0], V[0, 1], V[1, 0], V[1, 1])
    cdef double b = _det2(V[2, 2], V[2, 3], V[3, 2], V[3, 3])
    cdef double c = _det2(V[0, 2], V[0, 3], V[1, 2], V[1, 3])
    cdef double det = _det4(V)
    cdef double delta = a + b + 2.0 * c
    cdef double disc = delta * delta - 4.0 * det
    cdef double scale = max(1.0, delta * delta, fabs(4.0 * det))
    if disc < -DISC_TOL * scale:
        raise ValueError(f"invalid covariance: Delta^2 < 4 det V (Delta={delta}, det={det})")
    if disc < 0.0:
        disc = 0.0
    cdef double root = sqrt(disc)
    cdef double hi = (delta + root) / 2.0
    cdef double lo
    # stable smaller quadratic root: avoids the delta - sqrt(...) cancellation
    if delta + root > 0.0:
        lo = det / hi
    else:
        lo = (delta - root) / 2.0
    if lo < 0.0:
        lo = 0.0
    return sqrt(lo), sqrt(hi)


cdef double _entropy_term(double d) noexcept nogil:
    # ((d+1)/2) ln((d+1)/2) - ((d-1)/2) ln((d-1)/2), exact 0 limit at d = 1.
    # The closed-form symplectic pair loses ~sqrt(eps)*|V|^2 precision when
    # the spectrum is degenerate (pure states), so sub-1 values are clamped
    # to the zero-entropy limit here; the eig-based public genoni_delta
    # keeps the strict physicality check.
    cdef double p, q
    if d <= 1.0:
        return 0.0
    p = (d + 1.0) / 2.0
    q = (d - 1.0) / 2.0
    if q > 0.0:
        return p * log(p) - q * log(q)
    return p * log(p)


def genoni_two_mode(double[:, ::1] V):
    """Genoni delta of a two-mode covariance (nats)."""
    nu_lo, nu_hi = symplectic_pair(V)
    return _entropy_term(2.0 * nu_lo) + _entropy_term(2.0 * nu_hi)


cdef inline double _duan_ratio(double[:, ::1] v, double a, double sign) noexcept nogil:
    cdef double b = 1.0 / a
    cdef double var_u = a * a * v[0, 0] + b * b * v[2, 2] + 2.0 * sign * a * b * v[0, 2]
    cdef double var_v = a * a * v[1, 1] + b * b * v[3, 3] - 2.0 * sign * a * b * v[1, 3]
    return (var_u + var_v) / (a * a + b * b)


cdef double _golden_duan(double[:, ::1] v, double sign, double lo, double hi,
                         double tol) noexcept nogil:
    cdef double golden = 0.6180339887498949
    cdef double x1, x2, f1, f2
    x1 = hi - golden * (hi - lo)
    x2 = lo + golden * (hi - lo)
    f1 = _duan_ratio(v, exp(x1), sign)
    f2 = _duan_ratio(v, exp(x2), sign)
    while hi - lo > tol:
        if f1 <= f2:
            hi = x2
            x2 = x1
            f2 = f1
            x1 = hi - golden * (hi - lo)
            f1 = _duan_ratio(v, exp(x1), sign)
        else:
            lo = x1
            x1 = x2
            f1 = f2
            x2 = lo + golden * (hi - lo)
            f2 = _duan_ratio(v, exp(x2), sign)
    return f1 if f1 <= f2 else f2


def duan(double[:, ::1] V):
    """(duan value at unit gain, gain-optimized duan value); mirrors reference."""
    cdef double span = 3.0
    cdef double tol = 1e-8
    cdef double best_a1, best, sign, t, val, lo, hi, step
    cdef Py_ssize_t i, imin
    best_a1 = _duan_ratio(V, 1.0, 1.0)
    val = _duan_ratio(V, 1.0, -1.0)
    if val < best_a1:
        best_a1 = val
    best = best_a1
    step = 2.0 * span / 24.0
    for k in range(2):
        sign = 1.0 if k == 0 else -1.0
        imin = 0
        val = _duan_ratio(V, exp(-span), sign)
        for i in range(1, 25):
            t = -span + step * i
            if _duan_ratio(V, exp(t), sign) < val:
                val = _duan_ratio(V, exp(t), sign)
                imin = i
        lo = -span + step * (imin - 1) if imin > 0 else -span
        hi = -span + step * (imin + 1) if imin < 24 else span
        val = _golden_duan(V, sign, lo, hi, tol)
        if val < best:
            best = val
    return 1.0 - best_a1, 1.0 - best


def kappa_sums(double[:, ::1] V):
    """(paper-literal, true-multivariate) cumulant magnitudes from Wick moments."""
    cdef double kp = 0.0
    cdef double kt = 0.0
    cdef double m4, pjk, pjl, pjp
    cdef Py_ssize_t j, k, l, p
    with nogil:
        for j in range(4):
            for k in range(4):
                for l in range(4):
                    for p in range(4):
                        pjk = V[j, k] * V[l, p]
                        pjl = V[j, l] * V[k, p]
                        pjp = V[j, p] * V[k, l]
                        m4 = pjk + pjl + pjp
                        kp += fabs(m4 - 3.0 * pjk)
                        kt += fabs(m4 - pjk - pjl - pjp)
    return kp, kt
