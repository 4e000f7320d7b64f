"""Gaussian entanglement metrics from covariance matrices.

Covariances use the vacuum-variance-1/2 convention, quadrature order
(X1, Y1, X2, Y2, ...).  Logarithmic negativity is reported in nats.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

_SYM_TOL = 1e-10
DUAN_LOG_GAIN_RANGE = 3.0
DUAN_GAIN_TOL = 1e-8
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class EntanglementResult:
    """Bundle of the entanglement metrics computed from one 4x4 covariance."""

    log_negativity: float
    duan_value: float  # 1 - R, gain-optimized; positive certifies entanglement
    duan_value_a1: float  # same at fixed unit gain
    eta: float  # det V11 + det V22 - 2 det V12
    min_pt_symplectic: float  # smallest partial-transpose symplectic eigenvalue


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form, [[0, 1], [-1, 0]] per mode."""
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(n_modes), j)


def _check_cov(V: np.ndarray) -> np.ndarray:
    v = np.asarray(V, dtype=float)
    if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] % 2:
        raise ValueError(f"covariance must be square with even dimension (got {v.shape})")
    scale = max(1.0, np.abs(v).max())
    if np.abs(v - v.T).max() > _SYM_TOL * scale:
        raise ValueError("covariance matrix is not symmetric")
    return v


def symplectic_eigenvalues(V: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of V: |eig(i Omega V)|, one value per mode, ascending."""
    v = _check_cov(V)
    if np.linalg.eigvalsh(v).min() <= 0:
        raise ValueError("covariance matrix is not positive definite")
    n_modes = v.shape[0] // 2
    ev = np.linalg.eigvals(1j * symplectic_form(n_modes) @ v)
    nu = np.sort(np.abs(ev))
    # eigenvalues come in +/- pairs; average each adjacent pair
    return nu.reshape(n_modes, 2).mean(axis=1)


def _block_dets(v: np.ndarray) -> tuple[float, float, float, float]:
    a = np.linalg.det(v[:2, :2])
    b = np.linalg.det(v[2:, 2:])
    c = np.linalg.det(v[:2, 2:])
    d = np.linalg.det(v)
    return a, b, c, d


def pt_symplectic_min(V: np.ndarray) -> tuple[float, float]:
    """(nu_minus, eta) of the partially transposed two-mode covariance.

    eta = det V11 + det V22 - 2 det V12 carries the momentum sign flip of
    the partial transpose; nu_minus^2 = (eta - sqrt(eta^2 - 4 det V)) / 2.
    """
    v = _check_cov(V)
    if v.shape != (4, 4):
        raise ValueError(f"partial-transpose spectrum needs a 4x4 covariance (got {v.shape})")
    a, b, c, d = _block_dets(v)
    eta = a + b - 2.0 * c
    disc = eta * eta - 4.0 * d
    # the discriminant is nonnegative for any positive-definite symmetric
    # matrix, so small negatives are rounding; clearly indefinite V raises
    if disc < -1e-8 * max(1.0, eta * eta, abs(4.0 * d)):
        raise ValueError(f"unphysical covariance: eta^2 < 4 det V (eta={eta}, det={d})")
    root = math.sqrt(max(disc, 0.0))
    # stable smaller quadratic root: avoids the eta - sqrt(...) cancellation
    nu2 = 2.0 * d / (eta + root) if eta + root > 0.0 else (eta - root) / 2.0
    return math.sqrt(max(nu2, 0.0)), eta


def log_negativity(V: np.ndarray) -> float:
    """E_N = max(0, -ln(2 nu_minus)) for a two-mode covariance, in nats."""
    nu, _ = pt_symplectic_min(V)
    if nu <= 0.0:
        raise ValueError("degenerate partial-transpose spectrum (nu_minus = 0)")
    return max(0.0, -math.log(2.0 * nu))


def _duan_ratio(v: np.ndarray, a: float, sign: float) -> float:
    # [Var(a X1 + s X2/a) + Var(a Y1 - s Y2/a)] / (a^2 + 1/a^2); separable
    # states give >= 1 for every gain in the vacuum-variance-1/2 convention.
    b = 1.0 / a
    var_u = a * a * v[0, 0] + b * b * v[2, 2] + 2.0 * sign * a * b * v[0, 2]
    var_v = a * a * v[1, 1] + b * b * v[3, 3] - 2.0 * sign * a * b * v[1, 3]
    return (var_u + var_v) / (a * a + b * b)


def _golden_min(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def duan_details(V: np.ndarray) -> tuple[float, float, float]:
    """(duan at unit gain, gain-optimized duan, optimal gain a).

    duan = 1 - min over sign and gain of the normalized joint-variance sum;
    positive values certify entanglement, separable states give <= 0.
    The gain search is a coarse bracket plus golden-section refinement on
    log(a) in [-3, 3]; on numerical failure it falls back to unit gain.
    """
    v = _check_cov(V)
    if v.shape != (4, 4):
        raise ValueError(f"Duan measure needs a 4x4 covariance (got {v.shape})")
    best_a1 = min(_duan_ratio(v, 1.0, +1.0), _duan_ratio(v, 1.0, -1.0))
    best = best_a1
    best_gain = 1.0
    try:
        for sign in (+1.0, -1.0):
            def f(t: float, s=sign) -> float:
                return _duan_ratio(v, math.exp(t), s)

            ts = np.linspace(-DUAN_LOG_GAIN_RANGE, DUAN_LOG_GAIN_RANGE, 25)
            vals = [f(t) for t in ts]
            i = int(np.argmin(vals))
            lo = ts[max(i - 1, 0)]
            hi = ts[min(i + 1, len(ts) - 1)]
            t_opt, f_opt = _golden_min(f, lo, hi, DUAN_GAIN_TOL)
            if f_opt < best:
                best = f_opt
                best_gain = math.exp(t_opt)
        if not math.isfinite(best):
            raise FloatingPointError("non-finite Duan objective")
    except FloatingPointError:
        warnings.warn("Duan gain optimization failed; falling back to unit gain",
                      stacklevel=2)
        best, best_gain = best_a1, 1.0
    return 1.0 - best_a1, 1.0 - best, best_gain


def duan_measure(V: np.ndarray) -> float:
    """Gain-optimized Duan value 1 - R (positive iff the criterion is violated)."""
    return duan_details(V)[1]


def entanglement_summary(V: np.ndarray) -> EntanglementResult:
    """All entanglement metrics of a two-mode covariance in one pass."""
    nu, eta = pt_symplectic_min(V)
    e_n = max(0.0, -math.log(2.0 * nu)) if nu > 0 else math.inf
    d_a1, d_opt, _ = duan_details(V)
    return EntanglementResult(
        log_negativity=e_n,
        duan_value=d_opt,
        duan_value_a1=d_a1,
        eta=eta,
        min_pt_symplectic=nu,
    )


def assert_physical(V: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Symplectic eigenvalues of V, after checking nu >= 1/2 - tol for all."""
    nu = symplectic_eigenvalues(V)
    if nu.min() < 0.5 - tol:
        raise ValueError(f"unphysical covariance: min symplectic eigenvalue {nu.min()} < 1/2")
    return nu
