"""Pure-Python/numpy implementations of the per-grid-point hot kernels.

This module mirrors the API of the compiled extension `pondera._core` and is
selected automatically when the extension is unavailable (or when the
PONDERA_PURE environment variable is set).  It delegates to the public
library functions, so it doubles as the reference the compiled kernels are
tested against.
"""

from __future__ import annotations

import math

import numpy as np

from . import dynamics, entanglement, gaussianity

BACKEND = "pure-python"


def transfer_matrix(K: np.ndarray, omega: float, gamma_c: float) -> np.ndarray:
    """4 x dim optical transfer matrix sqrt(2 gc) M[optical rows] + D."""
    return dynamics.optical_transfer(np.asarray(K, dtype=float), omega, gamma_c)


def output_cov(t: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Symmetrized real output covariance Re(T G T^dag)."""
    return dynamics.covariance_from_transfer(np.asarray(t), np.asarray(g))


def logneg(V: np.ndarray) -> tuple[float, float]:
    """(log negativity, minimal PT symplectic eigenvalue)."""
    nu, _ = entanglement.pt_symplectic_min(V)
    if nu <= 0.0:
        raise ValueError("degenerate partial-transpose spectrum (nu_minus = 0)")
    return max(0.0, -math.log(2.0 * nu)), nu


def duan(V: np.ndarray) -> tuple[float, float]:
    """(duan value at unit gain, gain-optimized duan value)."""
    d_a1, d_opt, _ = entanglement.duan_details(V)
    return d_a1, d_opt


def symplectic_pair(V: np.ndarray) -> tuple[float, float]:
    """(nu_minus, nu_plus) of a two-mode covariance."""
    nu = entanglement.symplectic_eigenvalues(V)
    return float(nu[0]), float(nu[1])


def genoni_two_mode(V: np.ndarray) -> float:
    """Genoni delta of a two-mode covariance."""
    return gaussianity.genoni_delta(V)


def kappa_sums(V: np.ndarray) -> tuple[float, float]:
    """(paper-literal, true-multivariate) cumulant magnitudes from Wick moments."""
    kp = gaussianity.kappa_magnitude(gaussianity.fourth_cumulant(V, "paper_literal"))
    kt = gaussianity.kappa_magnitude(gaussianity.fourth_cumulant(V, "true_multivariate"))
    return kp, kt
