"""Experiment configuration: parsing, validation, and derived physical rates.

All quantities are SI unless a field name says otherwise.  Quadratures
follow the X = (a + a^dag)/sqrt(2) convention, so vacuum variance is 1/2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

from scipy import constants

HBAR = constants.hbar
K_B = constants.k
C_LIGHT = constants.c

DEFAULT_WAVELENGTH_M = 1064e-9
# Input-coupler transmission is the single normalization knob of the model:
# the cavity half-linewidth is gamma_c = c*(T_in + L_s)/(4 L).  Detunings are
# specified in units of gamma_c, so this default fixes the absolute scale.
DEFAULT_INPUT_TRANSMISSION_PPM = 25.0
# Fallback mechanical mode when the config omits `mech_modes`: a 50 ng
# oscillator at 100 kHz with the Table-style quality factor.
DEFAULT_MECH_FREQ_HZ = 1.0e5
DEFAULT_MECH_Q = 17000.0
DEFAULT_MECH_MASS_KG = 50e-9


class ConfigError(ValueError):
    """Raised for malformed config documents or violated invariants."""


@dataclass(frozen=True)
class OpticalFieldSpec:
    """One drive field: circulating/input power, detuning, wavelength."""

    circulating_power_W: float
    detuning_coeff: float
    input_power_W: float | None = None
    wavelength_m: float = DEFAULT_WAVELENGTH_M


@dataclass(frozen=True)
class MechanicalModeSpec:
    """One mechanical mode of the movable mirror."""

    resonance_freq: float  # rad/s
    quality_factor: float
    effective_mass: float  # kg


@dataclass(frozen=True)
class SqueezerSetting:
    """Squeezer configuration: angle plus either r directly or (mu, pump power)."""

    theta: float  # rad
    r: float | None = None
    mu: float | None = None  # W^(-1/2)
    pump_power_W: float | None = None


@dataclass(frozen=True)
class PhysicalConfig:
    """Validated simulation configuration (value semantics, hashable pieces)."""

    fields: tuple[OpticalFieldSpec, OpticalFieldSpec]
    mech_modes: tuple[MechanicalModeSpec, ...]
    squeezers: tuple[SqueezerSetting, SqueezerSetting]
    temperature_K: float
    loss_ppm: float
    cavity_length_m: float
    input_transmission_ppm: float = DEFAULT_INPUT_TRANSMISSION_PPM
    sideband_freq: float | None = None  # rad/s; None -> auto pre-scan

    @property
    def n_mech(self) -> int:
        return len(self.mech_modes)


@dataclass(frozen=True)
class DerivedRates:
    """Physical rates derived from a PhysicalConfig.

    Attributes
    ----------
    gamma_c : cavity amplitude decay rate (half-linewidth), rad/s
    alpha : per-field intracavity coherent amplitude, sqrt(photon number)
    g : per-field, per-mode linearized optomechanical coupling, rad/s
    gamma_m : per-mode mechanical damping rate, rad/s
    n_bar : per-mode thermal occupancy
    x_zpf : per-mode zero-point amplitude, m
    """

    gamma_c: float
    alpha: tuple[float, ...]
    g: tuple[tuple[float, ...], ...]
    gamma_m: tuple[float, ...]
    n_bar: tuple[float, ...]
    x_zpf: tuple[float, ...]


_TOP_KEYS = {
    "temperature_K",
    "loss_ppm",
    "cavity_length_m",
    "input_transmission_ppm",
    "sideband_freq_hz",
    "fields",
    "mech_modes",
    "squeezers",
}
_FIELD_KEYS = {"circulating_power_W", "input_power_W", "detuning_coeff", "wavelength_m"}
_MECH_KEYS = {"freq_hz", "quality_factor", "mass_kg"}
_SQZ_KEYS = {"r", "mu", "pump_power_W", "theta_rad"}


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def _number(d: dict, key: str, where: str, *, required: bool = True, default=None):
    if key not in d:
        _require(not required, f"{where}: missing required key '{key}'")
        return default
    v = d[key]
    _require(isinstance(v, (int, float)) and not isinstance(v, bool),
             f"{where}: key '{key}' must be a number (got {v!r})")
    _require(math.isfinite(float(v)), f"{where}: key '{key}' must be finite")
    return float(v)


def _check_keys(d: dict, allowed: set[str], where: str, lenient: bool) -> None:
    _require(isinstance(d, dict), f"{where}: expected an object")
    if not lenient:
        unknown = set(d) - allowed
        _require(not unknown, f"{where}: unknown keys {sorted(unknown)} (use lenient mode to ignore)")


def config_from_dict(doc: dict, *, lenient: bool = False) -> PhysicalConfig:
    """Validate a parsed JSON document and build a PhysicalConfig."""
    _check_keys(doc, _TOP_KEYS, "config", lenient)

    temperature = _number(doc, "temperature_K", "config")
    _require(temperature >= 0, f"temperature_K must be >= 0 (got {temperature})")
    loss_ppm = _number(doc, "loss_ppm", "config")
    _require(0 <= loss_ppm < 1e6, f"loss_ppm must satisfy 0 <= loss_ppm < 1e6 (got {loss_ppm})")
    length = _number(doc, "cavity_length_m", "config")
    _require(length > 0, f"cavity_length_m must be > 0 (got {length})")
    t_in = _number(doc, "input_transmission_ppm", "config",
                   required=False, default=DEFAULT_INPUT_TRANSMISSION_PPM)
    _require(0 <= t_in < 1e6,
             f"input_transmission_ppm must satisfy 0 <= value < 1e6 (got {t_in})")
    _require(t_in + loss_ppm > 0,
             "input_transmission_ppm + loss_ppm must be > 0 (cavity decay rate would vanish)")

    sideband = None
    if doc.get("sideband_freq_hz") is not None:
        f = _number(doc, "sideband_freq_hz", "config")
        _require(f > 0, f"sideband_freq_hz must be > 0 (got {f})")
        sideband = 2 * math.pi * f

    raw_fields = doc.get("fields")
    _require(isinstance(raw_fields, list) and len(raw_fields) == 2,
             "config: 'fields' must be a list of exactly 2 entries")
    fields = []
    for i, fd in enumerate(raw_fields):
        where = f"fields[{i}]"
        _check_keys(fd, _FIELD_KEYS, where, lenient)
        p_circ = _number(fd, "circulating_power_W", where)
        _require(p_circ >= 0, f"{where}: circulating_power_W must be >= 0 (got {p_circ})")
        p_in = _number(fd, "input_power_W", where, required=False)
        if p_in is not None:
            _require(p_in >= 0, f"{where}: input_power_W must be >= 0 (got {p_in})")
        det = _number(fd, "detuning_coeff", where)
        lam = _number(fd, "wavelength_m", where, required=False, default=DEFAULT_WAVELENGTH_M)
        _require(lam > 0, f"{where}: wavelength_m must be > 0 (got {lam})")
        fields.append(OpticalFieldSpec(p_circ, det, p_in, lam))

    raw_mech = doc.get("mech_modes")
    if raw_mech is None:
        raw_mech = [{"freq_hz": DEFAULT_MECH_FREQ_HZ,
                     "quality_factor": DEFAULT_MECH_Q,
                     "mass_kg": DEFAULT_MECH_MASS_KG}]
    _require(isinstance(raw_mech, list) and len(raw_mech) >= 1,
             "config: 'mech_modes' must be a non-empty list")
    mech = []
    for i, md in enumerate(raw_mech):
        where = f"mech_modes[{i}]"
        _check_keys(md, _MECH_KEYS, where, lenient)
        f_hz = _number(md, "freq_hz", where)
        q = _number(md, "quality_factor", where)
        m = _number(md, "mass_kg", where)
        _require(f_hz > 0, f"{where}: freq_hz must be > 0 (got {f_hz})")
        _require(q > 0, f"{where}: quality_factor must be > 0 (got {q})")
        _require(m > 0, f"{where}: mass_kg must be > 0 (got {m})")
        mech.append(MechanicalModeSpec(2 * math.pi * f_hz, q, m))

    raw_sqz = doc.get("squeezers")
    _require(isinstance(raw_sqz, list) and len(raw_sqz) == 2,
             "config: 'squeezers' must be a list of exactly 2 entries")
    squeezers = []
    for i, sd in enumerate(raw_sqz):
        where = f"squeezers[{i}]"
        _check_keys(sd, _SQZ_KEYS, where, lenient)
        theta = _number(sd, "theta_rad", where)
        r = _number(sd, "r", where, required=False)
        mu = _number(sd, "mu", where, required=False)
        pump = _number(sd, "pump_power_W", where, required=False)
        _require((r is None) != (mu is None),
                 f"{where}: give exactly one of 'r' or 'mu'")
        if r is not None:
            _require(r >= 0, f"{where}: r must be >= 0 (got {r})")
        else:
            _require(mu >= 0, f"{where}: mu must be >= 0 (got {mu})")
            if pump is None:
                # mu-form without an explicit pump: use the matching field's
                # input power (the squeezer pump and the drive laser coincide).
                pump = fields[i].input_power_W
                _require(pump is not None,
                         f"{where}: 'mu' given without 'pump_power_W' and "
                         f"fields[{i}].input_power_W is not set")
            _require(pump >= 0, f"{where}: pump_power_W must be >= 0 (got {pump})")
        squeezers.append(SqueezerSetting(theta, r, mu, pump))

    return PhysicalConfig(
        fields=tuple(fields),
        mech_modes=tuple(mech),
        squeezers=tuple(squeezers),
        temperature_K=temperature,
        loss_ppm=loss_ppm,
        cavity_length_m=length,
        input_transmission_ppm=t_in,
        sideband_freq=sideband,
    )


def load_config(text: str, *, lenient: bool = False) -> PhysicalConfig:
    """Parse a JSON config document and validate it.

    Raises ConfigError both for malformed JSON and for violated invariants;
    the message names the offending key.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    return config_from_dict(doc, lenient=lenient)


def _drop_none(d: dict) -> dict:
    return {k: v for k, v in d.items() if v is not None}


def config_to_dict(cfg: PhysicalConfig) -> dict:
    """Serialize back to the JSON document schema (round-trips load_config)."""
    doc = {
        "temperature_K": cfg.temperature_K,
        "loss_ppm": cfg.loss_ppm,
        "cavity_length_m": cfg.cavity_length_m,
        "input_transmission_ppm": cfg.input_transmission_ppm,
        "fields": [
            _drop_none({
                "circulating_power_W": f.circulating_power_W,
                "input_power_W": f.input_power_W,
                "detuning_coeff": f.detuning_coeff,
                "wavelength_m": f.wavelength_m,
            })
            for f in cfg.fields
        ],
        "mech_modes": [
            {
                "freq_hz": m.resonance_freq / (2 * math.pi),
                "quality_factor": m.quality_factor,
                "mass_kg": m.effective_mass,
            }
            for m in cfg.mech_modes
        ],
        "squeezers": [
            _drop_none({"theta_rad": s.theta, "r": s.r, "mu": s.mu,
                        "pump_power_W": s.pump_power_W})
            for s in cfg.squeezers
        ],
    }
    if cfg.sideband_freq is not None:
        doc["sideband_freq_hz"] = cfg.sideband_freq / (2 * math.pi)
    return doc


def squeeze_strength(setting: SqueezerSetting) -> float:
    """Squeezing parameter r for a squeezer setting (r = mu*sqrt(pump power))."""
    if setting.r is not None:
        return setting.r
    return setting.mu * math.sqrt(setting.pump_power_W)


def thermal_occupancy(omega_m: float, temperature_K: float) -> float:
    """Bose-Einstein occupancy 1/(exp(hbar*Omega/kT) - 1); 0 at T = 0."""
    if temperature_K == 0.0:
        return 0.0
    x = HBAR * omega_m / (K_B * temperature_K)
    if x > 700.0:  # exp would overflow; occupancy is indistinguishable from 0
        return 0.0
    return 1.0 / math.expm1(x)


def derive_rates(cfg: PhysicalConfig) -> DerivedRates:
    """Compute decay, coupling and occupancy rates from a validated config.

    gamma_c follows from the round-trip photon loss budget of a linear cavity
    (input-coupler transmission + internal loss over a round trip 2L):
    gamma_c = c*(T_in + L_s)/(4 L).  The coherent amplitude uses the stored
    intracavity energy, alpha_j^2 = 2 P_circ L / (hbar omega_j c), and the
    linearized coupling is g_j = (omega_j/L) * x_zpf * alpha_j.
    """
    t_in = cfg.input_transmission_ppm * 1e-6
    loss = cfg.loss_ppm * 1e-6
    gamma_c = C_LIGHT * (t_in + loss) / (4.0 * cfg.cavity_length_m)
    if not (gamma_c > 0 and math.isfinite(gamma_c)):
        raise ConfigError(f"degenerate cavity geometry: gamma_c = {gamma_c}")

    alphas = []
    for f in cfg.fields:
        omega_l = 2 * math.pi * C_LIGHT / f.wavelength_m
        alphas.append(math.sqrt(2 * f.circulating_power_W * cfg.cavity_length_m
                                / (HBAR * omega_l * C_LIGHT)))

    x_zpf = tuple(math.sqrt(HBAR / (2 * m.effective_mass * m.resonance_freq))
                  for m in cfg.mech_modes)
    g = tuple(
        tuple((2 * math.pi * C_LIGHT / f.wavelength_m / cfg.cavity_length_m) * xz * a
              for xz in x_zpf)
        for f, a in zip(cfg.fields, alphas)
    )
    gamma_m = tuple(m.resonance_freq / m.quality_factor for m in cfg.mech_modes)
    n_bar = tuple(thermal_occupancy(m.resonance_freq, cfg.temperature_K)
                  for m in cfg.mech_modes)

    rates = DerivedRates(gamma_c, tuple(alphas), g, gamma_m, n_bar, x_zpf)
    for name, vals in (("alpha", rates.alpha), ("gamma_m", rates.gamma_m),
                       ("n_bar", rates.n_bar), ("x_zpf", rates.x_zpf)):
        if not all(math.isfinite(v) for v in vals):
            raise ConfigError(f"derived rate '{name}' is not finite: {vals}")
    return rates


def with_squeezers(cfg: PhysicalConfig,
                   settings: tuple[SqueezerSetting, SqueezerSetting]) -> PhysicalConfig:
    """Copy of cfg with both squeezer settings replaced."""
    return replace(cfg, squeezers=settings)
