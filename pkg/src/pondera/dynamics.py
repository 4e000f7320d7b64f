"""Linearized three-mode optomechanics in the sideband-frequency domain.

Builds the drift matrix of the quantum Langevin system, assembles input
noise spectra (squeezed / vacuum optical channels plus thermal mechanical
channels), and propagates them to output optical covariance matrices via
cavity input-output theory.

Quadrature ordering is (X1, Y1, X2, Y2, Xm1, Ym1, ...).  Input noise
operators are pre-scaled by sqrt(2*rate) per channel, so the drift relation
reads du/dt = K u + u_N and the output of the monitored port is
u_out = sqrt(2*gamma_c) u_c - u_in on the optical channels.  With the
d/dt -> -i*Omega Fourier convention this gives the optical transfer
T(Omega) = sqrt(2*gamma_c) * M(Omega)[optical rows] + diag(1/sqrt(2*gamma_c))
acting on the rate-scaled inputs, where M(Omega) = inv(K + i*Omega*I); the
overall sign of u_out drops out of the covariance.  An empty lossless cavity
then maps vacuum to vacuum exactly, at every sideband frequency.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .params import DerivedRates, PhysicalConfig, squeeze_strength

N_OPTICAL = 4  # two fields, two quadratures each


class UnstableDriftWarning(UserWarning):
    """Drift matrix has an eigenvalue with non-negative real part."""


@dataclass(frozen=True)
class CouplingMatrix:
    """Real drift matrix K of the linearized Langevin system."""

    entries: np.ndarray  # (4+2N, 4+2N)
    n_mech: int
    stable: bool

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class NoiseSpectrum:
    """Input-noise covariance over all channels, rate normalization included.

    `entries` is the covariance of the rate-scaled inputs u_N, i.e. each
    2x2 block carries a 2*rate prefactor; `channel_rates` records the rate
    per quadrature channel.  `mode` tags which optical-block recipe was used.
    """

    entries: np.ndarray  # (4+2N, 4+2N) complex
    channel_rates: np.ndarray  # (4+2N,)
    mode: str = "sideband_squeezed"

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def build_coupling_matrix(rates: DerivedRates, cfg: PhysicalConfig) -> CouplingMatrix:
    """Assemble the drift matrix K for the configured fields and modes.

    Per field j (detuning Delta_j = d_j * gamma_c):
        dX_j/dt = -gamma_c X_j + Delta_j Y_j
        dY_j/dt = -gamma_c Y_j - Delta_j X_j + sum_k 2 g_jk Xm_k
    Per mechanical mode k:
        dXm_k/dt = Omega_k Ym_k
        dYm_k/dt = -Omega_k Xm_k - gamma_mk Ym_k + sum_j 2 g_jk X_j

    Emits UnstableDriftWarning (and sets stable=False) when any eigenvalue
    has a non-negative real part; the matrix is still returned.
    """
    n_mech = cfg.n_mech
    n = N_OPTICAL + 2 * n_mech
    k = np.zeros((n, n))
    gamma_c = rates.gamma_c
    for j, fspec in enumerate(cfg.fields):
        i0 = 2 * j
        delta = fspec.detuning_coeff * gamma_c
        k[i0, i0] = -gamma_c
        k[i0, i0 + 1] = delta
        k[i0 + 1, i0] = -delta
        k[i0 + 1, i0 + 1] = -gamma_c
        for m in range(n_mech):
            k[i0 + 1, N_OPTICAL + 2 * m] += 2.0 * rates.g[j][m]
    for m, mode in enumerate(cfg.mech_modes):
        xm = N_OPTICAL + 2 * m
        k[xm, xm + 1] = mode.resonance_freq
        k[xm + 1, xm] = -mode.resonance_freq
        k[xm + 1, xm + 1] = -rates.gamma_m[m]
        for j in range(2):
            k[xm + 1, 2 * j] += 2.0 * rates.g[j][m]

    eig = np.linalg.eigvals(k)
    stable = bool(np.all(eig.real < 0.0))
    if not stable:
        warnings.warn(
            f"drift matrix is unstable (max Re eigenvalue = {eig.real.max():.3e} rad/s); "
            "frequency-domain covariances at this configuration are not meaningful",
            UnstableDriftWarning,
            stacklevel=2,
        )
    return CouplingMatrix(entries=k, n_mech=n_mech, stable=stable)


def response_matrix(K: CouplingMatrix | np.ndarray, omega: float) -> np.ndarray:
    """M(Omega) = inv(K + i*Omega*I), with a residual sanity check."""
    k = K.entries if isinstance(K, CouplingMatrix) else np.asarray(K)
    n = k.shape[0]
    a = k + 1j * omega * np.eye(n)
    try:
        m = np.linalg.inv(a)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"response matrix singular at omega = {omega!r} rad/s") from exc
    resid = np.abs(a @ m - np.eye(n)).max()
    scale = max(1.0, np.abs(a).max() * np.abs(m).max())
    if not np.isfinite(resid) or resid > 1e-6 * scale:
        raise ValueError(
            f"response matrix ill-conditioned at omega = {omega!r} rad/s "
            f"(residual {resid:.3e})"
        )
    return m


def sideband_squeeze_matrix(r: float, theta: float) -> np.ndarray:
    """Quadrature transform of single-mode squeezing on the sideband fields.

    Symmetric, determinant 1:
        [[cosh r + cos(2 theta) sinh r,  sin(2 theta) sinh r],
         [sin(2 theta) sinh r,           cosh r - cos(2 theta) sinh r]]
    """
    if r < 0:
        raise ValueError(f"squeezing strength must be >= 0 (got {r})")
    ch, sh = math.cosh(r), math.sinh(r)
    c2, s2 = math.cos(2 * theta), math.sin(2 * theta)
    return np.array([[ch + c2 * sh, s2 * sh], [s2 * sh, ch - c2 * sh]])


def _paper_literal_block(r: float, theta: float, alpha: float) -> np.ndarray:
    # Verbatim transcription of the printed per-field input-noise block,
    # including its alpha-dependent terms and the non-conjugate-symmetric
    # off-diagonal; kept as a reference mode only (see input_noise_spectrum).
    a = cmath.cosh(r) - cmath.exp(-1j * theta) * cmath.sinh(r)
    b = cmath.cosh(r) - cmath.exp(1j * theta) * cmath.sinh(r)
    al = complex(alpha)
    g11 = (a * a * al + b * b * al.conjugate() ** 2 + a * b * (2 * abs(al) ** 2 + 1)) / 2
    g12 = (1j * (b * b * al.conjugate() ** 2 - a * a * al * al + a * b) - 1) / 2
    g22 = (-a * a * al - b * b * al.conjugate() ** 2 + a * b * (2 * abs(al) ** 2 + 1) - 1) / 2
    return np.array([[g11, g12], [-g12, g22]])


def input_noise_spectrum(
    cfg: PhysicalConfig,
    rates: DerivedRates,
    mode: str = "sideband_squeezed",
    *,
    input_coupling: float = 1.0,
) -> NoiseSpectrum:
    """Assemble the input-noise covariance <G> over all channels.

    Default mode squeezes the sideband fields prior to injection: optical
    block j is (2*gamma_c) * S(r_j, theta_j) S^T / 2, mechanical block k is
    (2*gamma_mk) * (n_bar_k + 1/2) * I.  `input_coupling` is the power
    fraction of the squeezed light actually coupled into the cavity mode;
    the uncoupled remainder is replaced by vacuum.

    mode="paper_literal" instead evaluates the printed per-field block with
    A_j, B_j and the configured coherent amplitude.  That matrix mixes
    displacement terms into the fluctuation covariance and is not Hermitian;
    it is provided for reproducibility, not for production sweeps.
    """
    if mode not in ("sideband_squeezed", "paper_literal"):
        raise ValueError(f"unknown noise mode {mode!r}")
    if not 0.0 <= input_coupling <= 1.0:
        raise ValueError(f"input_coupling must be in [0, 1] (got {input_coupling})")
    n = N_OPTICAL + 2 * cfg.n_mech
    g = np.zeros((n, n), dtype=complex)
    vac = np.eye(2) / 2.0
    for j, sqz in enumerate(cfg.squeezers):
        r = squeeze_strength(sqz)
        if mode == "sideband_squeezed":
            s = sideband_squeeze_matrix(r, sqz.theta)
            block = s @ s.T / 2.0
            block = input_coupling * block + (1.0 - input_coupling) * vac
        else:
            block = _paper_literal_block(r, sqz.theta, rates.alpha[j])
        g[2 * j:2 * j + 2, 2 * j:2 * j + 2] = 2.0 * rates.gamma_c * block
    for m in range(cfg.n_mech):
        i0 = N_OPTICAL + 2 * m
        g[i0:i0 + 2, i0:i0 + 2] = (2.0 * rates.gamma_m[m]
                                   * (rates.n_bar[m] + 0.5) * np.eye(2))
    channel_rates = np.array(
        [rates.gamma_c] * N_OPTICAL
        + [rm for rm in rates.gamma_m for _ in range(2)]
    )
    return NoiseSpectrum(entries=g, channel_rates=channel_rates, mode=mode)


def thermal_quantum_split(
    cfg: PhysicalConfig,
    rates: DerivedRates,
    mode: str = "sideband_squeezed",
    *,
    input_coupling: float = 1.0,
) -> tuple[NoiseSpectrum, NoiseSpectrum]:
    """Split the input noise into quantum and thermal parts.

    Quantum: optical channels plus the mechanical zero-point 1/2; thermal:
    the n_bar part of the mechanical channels.  The parts sum exactly to
    input_noise_spectrum(...).
    """
    full = input_noise_spectrum(cfg, rates, mode, input_coupling=input_coupling)
    g_th = np.zeros_like(full.entries)
    for m in range(cfg.n_mech):
        i0 = N_OPTICAL + 2 * m
        g_th[i0:i0 + 2, i0:i0 + 2] = 2.0 * rates.gamma_m[m] * rates.n_bar[m] * np.eye(2)
    g_q = full.entries - g_th
    quantum = NoiseSpectrum(g_q, full.channel_rates, full.mode)
    thermal = NoiseSpectrum(g_th, full.channel_rates, full.mode)
    return quantum, thermal


def optical_transfer(K: CouplingMatrix | np.ndarray, omega: float, gamma_c: float) -> np.ndarray:
    """4 x dim transfer matrix from rate-scaled inputs to the output fields."""
    m = response_matrix(K, omega)
    t = math.sqrt(2.0 * gamma_c) * m[:N_OPTICAL, :]
    t[:, :N_OPTICAL] += np.eye(N_OPTICAL) / math.sqrt(2.0 * gamma_c)
    return t


def covariance_from_transfer(t: np.ndarray, G: NoiseSpectrum | np.ndarray) -> np.ndarray:
    """Symmetrized real output covariance Re(T G T^dag) for a transfer matrix."""
    g = G.entries if isinstance(G, NoiseSpectrum) else np.asarray(G)
    v = (t @ g @ t.conj().T).real
    return (v + v.T) / 2.0


def output_covariance(
    K: CouplingMatrix | np.ndarray,
    G: NoiseSpectrum | np.ndarray,
    omega: float,
    gamma_c: float,
) -> np.ndarray:
    """Output optical covariance V(Omega): 4x4 real symmetric, vacuum = I/2."""
    return covariance_from_transfer(optical_transfer(K, omega, gamma_c), G)


def apply_loss(V: np.ndarray, loss: float) -> np.ndarray:
    """Beamsplitter loss on each optical mode: V' = (1-loss) V + loss I/2."""
    if not 0.0 <= loss < 1.0:
        raise ValueError(f"loss must satisfy 0 <= loss < 1 (got {loss})")
    v = np.asarray(V, dtype=float)
    return (1.0 - loss) * v + loss * np.eye(v.shape[0]) / 2.0


def beamsplitter_mix(V: np.ndarray, transmittance: float) -> np.ndarray:
    """Mix the two optical modes of a 4x4 covariance on a beamsplitter."""
    if not 0.0 <= transmittance <= 1.0:
        raise ValueError(f"transmittance must be in [0, 1] (got {transmittance})")
    v = np.asarray(V, dtype=float)
    if v.shape != (4, 4):
        raise ValueError(f"beamsplitter_mix expects a two-mode 4x4 covariance (got {v.shape})")
    ta = math.sqrt(transmittance)
    ra = math.sqrt(1.0 - transmittance)
    i2 = np.eye(2)
    s = np.block([[ta * i2, ra * i2], [-ra * i2, ta * i2]])
    return s @ v @ s.T


def decompose_noise_contributions(
    K: CouplingMatrix | np.ndarray,
    G_parts: list[NoiseSpectrum] | list[np.ndarray],
    omega: float,
    gamma_c: float,
) -> list[np.ndarray]:
    """Per-source output covariance contributions (linearity of V in <G>)."""
    if not G_parts:
        raise ValueError("G_parts must be non-empty")
    dims = {(g.entries if isinstance(g, NoiseSpectrum) else np.asarray(g)).shape
            for g in G_parts}
    if len(dims) != 1:
        raise ValueError(f"noise parts disagree on channel layout: {sorted(dims)}")
    t = optical_transfer(K, omega, gamma_c)
    (shape,) = dims
    if shape != (t.shape[1], t.shape[1]):
        raise ValueError(
            f"noise parts have shape {shape} but the drift matrix has {t.shape[1]} channels")
    return [covariance_from_transfer(t, g) for g in G_parts]
