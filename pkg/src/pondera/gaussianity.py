"""Deviation-from-Gaussianity metrics and the fourth-order cumulant machinery.

Two cumulant estimators ship side by side: the `paper_literal` one applies
the single-variable kurtosis formula kappa = <QjQkQlQp> - 3<QjQk><QlQp> to
every index tuple (nonzero on mixed indices even for Gaussian states), and
`true_multivariate` subtracts all three Wick pairings (identically zero for
any Gaussian covariance).  Keeping both makes the discrepancy between them
reproducible instead of hidden.  A Monte-Carlo quadruple-homodyne sampler
provides an independent route to the same moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entanglement import symplectic_eigenvalues

ESTIMATORS = ("paper_literal", "true_multivariate")
SOURCES = ("analytic_wick", "monte_carlo")


@dataclass(frozen=True)
class CumulantTensor:
    """Dense rank-4 cumulant tensor over the four output quadratures."""

    entries: np.ndarray  # (4, 4, 4, 4)
    estimator: str
    source: str
    n_samples: int | None = None
    seed: int | None = None


def gaussian_entropy_term(d: float) -> float:
    """((d+1)/2) ln((d+1)/2) - ((d-1)/2) ln((d-1)/2); d = 2 nu, f(1) = 0."""
    if d < 1.0:
        if d < 1.0 - 2e-9:
            raise ValueError(f"unphysical symplectic eigenvalue: 2*nu = {d} < 1")
        return 0.0
    if d == 1.0:
        return 0.0
    p = (d + 1.0) / 2.0
    q = (d - 1.0) / 2.0
    return p * math.log(p) - (q * math.log(q) if q > 0.0 else 0.0)


def genoni_delta(V: np.ndarray) -> float:
    """Non-Gaussianity proxy: von Neumann entropy S(V) in nats.

    Zero exactly when every symplectic eigenvalue equals 1/2 (pure Gaussian
    state).  Computed unconditionally for whatever covariance is supplied;
    the pure-global-state interpretation is the caller's responsibility.
    """
    return float(sum(gaussian_entropy_term(2.0 * nu) for nu in symplectic_eigenvalues(V)))


def delta_difference(V_squeezed: np.ndarray, V_baseline: np.ndarray) -> float:
    """delta(squeezed) - delta(baseline)."""
    return genoni_delta(V_squeezed) - genoni_delta(V_baseline)


def _wick_fourth_moments(V: np.ndarray) -> np.ndarray:
    # <Qj Qk Ql Qp> = Vjk Vlp + Vjl Vkp + Vjp Vkl for zero-mean Gaussians
    return (np.einsum("jk,lp->jklp", V, V)
            + np.einsum("jl,kp->jklp", V, V)
            + np.einsum("jp,kl->jklp", V, V))


def sample_homodyne(V: np.ndarray, n: int, seed: int) -> np.ndarray:
    """n i.i.d. zero-mean Gaussian quadrature samples with covariance V.

    Simulates quadruple-homodyne records via the Cholesky factor of V;
    deterministic for a fixed seed.
    """
    if n < 1:
        raise ValueError(f"sample count must be >= 1 (got {n})")
    v = np.asarray(V, dtype=float)
    try:
        chol = np.linalg.cholesky(v)
    except np.linalg.LinAlgError as exc:
        raise ValueError("covariance is not positive definite (Cholesky failed)") from exc
    rng = np.random.default_rng(seed)
    return rng.standard_normal((int(n), v.shape[0])) @ chol.T


def _empirical_moments(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = samples.shape[0]
    second = samples.T @ samples / n
    fourth = np.einsum("ij,ik,il,ip->jklp", samples, samples, samples, samples,
                       optimize=True) / n
    return second, fourth


def fourth_cumulant(
    V: np.ndarray,
    estimator: str = "paper_literal",
    source: str = "analytic_wick",
    *,
    n_samples: int = 10**6,
    seed: int = 0,
) -> CumulantTensor:
    """Fourth-order cumulant tensor kappa_{jklp} of the output quadratures.

    estimator:
        "paper_literal"     kappa = m4 - 3 <QjQk><QlQp>
        "true_multivariate" kappa = m4 - (all three pairings)
    source:
        "analytic_wick"  fourth moments from Wick pairing of V
        "monte_carlo"    moments estimated from n_samples draws (seeded)
    """
    if estimator not in ESTIMATORS:
        raise ValueError(f"unknown estimator {estimator!r}")
    if source not in SOURCES:
        raise ValueError(f"unknown source {source!r}")
    v = np.asarray(V, dtype=float)
    if v.shape != (4, 4):
        raise ValueError(f"cumulant tensor is defined over 4 quadratures (got {v.shape})")
    if source == "analytic_wick":
        second, fourth = v, _wick_fourth_moments(v)
        meta: dict = {}
    else:
        second, fourth = _empirical_moments(sample_homodyne(v, n_samples, seed))
        meta = {"n_samples": int(n_samples), "seed": int(seed)}
    if estimator == "paper_literal":
        kappa = fourth - 3.0 * np.einsum("jk,lp->jklp", second, second)
    else:
        kappa = (fourth
                 - np.einsum("jk,lp->jklp", second, second)
                 - np.einsum("jl,kp->jklp", second, second)
                 - np.einsum("jp,kl->jklp", second, second))
    return CumulantTensor(entries=kappa, estimator=estimator, source=source, **meta)


def kappa_magnitude(kappa: CumulantTensor | np.ndarray) -> float:
    """Absolute sum over all 256 tensor entries, sum |kappa_{jklp}|."""
    entries = kappa.entries if isinstance(kappa, CumulantTensor) else np.asarray(kappa)
    return float(np.abs(entries).sum())


def bch_angle_coefficient(r1: float, theta: float, r2: float, phi: float) -> float:
    """Leading squeeze-product commutator coefficient, 4 r1 r2 sin(theta - phi).

    Vanishes when the two squeezing angles coincide or either strength is
    zero; used as a sweep diagnostic for angle-difference sensitivity.
    """
    if r1 < 0 or r2 < 0:
        raise ValueError("squeezing strengths must be >= 0")
    return 4.0 * r1 * r2 * math.sin(theta - phi)


def point_seed(base_seed: int, index: int) -> int:
    """Deterministic per-grid-point RNG seed derived from (base seed, index)."""
    return int(np.random.SeedSequence((int(base_seed), int(index))).generate_state(1)[0])
