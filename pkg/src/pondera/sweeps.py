"""Parameter sweeps over squeezing angle, strength, and sideband frequency.

Every sweep is a pure map over its grid: records are written to
pre-allocated slots by index, so evaluation order (and the thread count)
cannot change the result.  The analysis sideband frequency for angle and
strength grids is either taken from the config or chosen by a coarse
pre-scan that maximizes the unsqueezed logarithmic negativity; the chosen
value is recorded in the grid metadata.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, kernels
from .dynamics import (
    CouplingMatrix,
    beamsplitter_mix,
    build_coupling_matrix,
    sideband_squeeze_matrix,
    thermal_quantum_split,
)
from .gaussianity import bch_angle_coefficient
from .params import (
    ConfigError,
    PhysicalConfig,
    SqueezerSetting,
    config_to_dict,
    derive_rates,
    squeeze_strength,
    with_squeezers,
)

DEFAULT_COMPARE_COUPLING_PPM = 50.0

# Metric column order is fixed and versioned: this is the CSV schema after
# the axis columns.
METRIC_FIELDS = (
    "e_n",
    "duan_a1",
    "duan_opt",
    "genoni_delta",
    "delta_diff",
    "kappa_paper",
    "kappa_true",
    "kappa_diff",
    "quantum_noise_trace",
    "thermal_noise_trace",
    "noise_ratio",
    "stable",
    "bch_coefficient",
    "e_n_baseline",
    "duan_a1_baseline",
    "duan_opt_baseline",
)


@dataclass(frozen=True)
class SweepAxis:
    """One sweep dimension: named, unit-tagged, strictly monotone values."""

    name: str
    values: tuple[float, ...]
    unit: str

    def __post_init__(self):
        if len(self.values) == 0:
            raise ValueError(f"axis '{self.name}' is empty")
        diffs = np.diff(self.values)
        if len(diffs) and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError(f"axis '{self.name}' values must be strictly monotone")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class MetricRecord:
    """Full set of metrics evaluated at one grid point."""

    coords: tuple[float, ...]
    e_n: float = math.nan
    duan_a1: float = math.nan
    duan_opt: float = math.nan
    genoni_delta: float = math.nan
    delta_diff: float = math.nan
    kappa_paper: float = math.nan
    kappa_true: float = math.nan
    kappa_diff: float = math.nan
    quantum_noise_trace: float = math.nan
    thermal_noise_trace: float = math.nan
    noise_ratio: float = math.nan
    stable: bool = False
    bch_coefficient: float = math.nan
    e_n_baseline: float = math.nan
    duan_a1_baseline: float = math.nan
    duan_opt_baseline: float = math.nan


@dataclass(frozen=True)
class MetricGrid:
    """Sweep result: axes, dense row-major records, and run metadata."""

    axes: tuple[SweepAxis, ...]
    records: tuple[MetricRecord, ...]
    config: dict
    kind: str
    analysis_omega: float | None
    noise_mode: str
    engine_version: str = __version__
    backend: str = field(default_factory=kernels.backend_name)
    seed: int = 0

    def __post_init__(self):
        expect = int(np.prod([len(a) for a in self.axes]))
        if len(self.records) != expect:
            raise ValueError(
                f"record count {len(self.records)} does not match grid size {expect}")

    def shape(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.axes)

    def column(self, name: str) -> np.ndarray:
        """One metric column reshaped to the grid shape."""
        vals = np.array([getattr(r, name) for r in self.records], dtype=float)
        return vals.reshape(self.shape())

    def to_dict(self) -> dict:
        return {
            "axes": [{"name": a.name, "values": list(a.values), "unit": a.unit}
                     for a in self.axes],
            "records": [asdict(r) | {"coords": list(r.coords)} for r in self.records],
            "config": self.config,
            "kind": self.kind,
            "analysis_omega": self.analysis_omega,
            "noise_mode": self.noise_mode,
            "engine_version": self.engine_version,
            "backend": self.backend,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricGrid":
        axes = tuple(SweepAxis(a["name"], tuple(a["values"]), a["unit"])
                     for a in d["axes"])
        records = []
        for rd in d["records"]:
            kw = dict(rd)
            kw["coords"] = tuple(kw["coords"])
            records.append(MetricRecord(**kw))
        return cls(
            axes=axes,
            records=tuple(records),
            config=d["config"],
            kind=d["kind"],
            analysis_omega=d["analysis_omega"],
            noise_mode=d["noise_mode"],
            engine_version=d["engine_version"],
            backend=d["backend"],
            seed=d["seed"],
        )

    def csv_rows(self):
        """Header and rows for the RFC-4180 writer (axis columns first)."""
        header = [a.name for a in self.axes] + list(METRIC_FIELDS)
        yield header
        for rec in self.records:
            row = [repr(float(c)) for c in rec.coords]
            for name in METRIC_FIELDS:
                val = getattr(rec, name)
                row.append("true" if val is True else
                           "false" if val is False else repr(float(val)))
            yield row


def _nan_record(coords, bch: float, stable: bool = False) -> MetricRecord:
    return MetricRecord(coords=coords, stable=stable, bch_coefficient=bch)


class PointEngine:
    """Per-config machinery shared by all grid points of a sweep.

    The drift matrix is squeeze-independent, so transfers (one LU per
    frequency) and the unsqueezed baseline metrics are computed once and
    reused; only the input-noise blocks vary across a grid.
    """

    def __init__(self, cfg: PhysicalConfig, *, noise_mode: str = "sideband_squeezed"):
        self.cfg = cfg
        self.rates = derive_rates(cfg)
        self.K: CouplingMatrix = build_coupling_matrix(self.rates, cfg)
        self.noise_mode = noise_mode
        self.output_loss = cfg.loss_ppm * 1e-6
        self._transfers: dict[float, np.ndarray | None] = {}
        self._baselines: dict[float, tuple] = {}

    def transfer(self, omega: float):
        if omega not in self._transfers:
            try:
                t = kernels.transfer_matrix(self.K.entries, float(omega),
                                            self.rates.gamma_c)
            except ValueError:
                t = None
            self._transfers[omega] = t
        return self._transfers[omega]

    def prepare(self, omegas) -> None:
        """Populate the per-frequency caches serially (thread-safe reads after)."""
        for om in omegas:
            self.transfer(om)
            self.baseline(om)

    def _covariances(self, t, settings, input_coupling):
        cfg = with_squeezers(self.cfg, settings)
        g_q, g_t = thermal_quantum_split(cfg, self.rates, self.noise_mode,
                                         input_coupling=input_coupling)
        v_q = kernels.output_cov(t, g_q.entries)
        v_t = kernels.output_cov(t, g_t.entries)
        if self.output_loss:
            eye = np.eye(4)
            v_q = (1.0 - self.output_loss) * v_q + self.output_loss * eye / 2.0
            v_t = (1.0 - self.output_loss) * v_t
        return v_q, v_t

    def baseline(self, omega: float):
        """Unsqueezed metrics (e_n, duan_a1, duan_opt, delta, kappa_paper) at omega."""
        if omega not in self._baselines:
            t = self.transfer(omega)
            if t is None or not self.K.stable:
                self._baselines[omega] = None
            else:
                vac = (SqueezerSetting(theta=0.0, r=0.0), SqueezerSetting(theta=0.0, r=0.0))
                v_q, v_t = self._covariances(t, vac, 1.0)
                v = v_q + v_t
                e_n, _ = kernels.logneg(v)
                d_a1, d_opt = kernels.duan(v)
                delta = kernels.genoni_two_mode(v)
                kp, _ = kernels.kappa_sums(v)
                self._baselines[omega] = (e_n, d_a1, d_opt, delta, kp)
        return self._baselines[omega]

    def evaluate(self, coords, omega: float,
                 settings: tuple[SqueezerSetting, SqueezerSetting],
                 input_coupling: float = 1.0) -> MetricRecord:
        r1, r2 = squeeze_strength(settings[0]), squeeze_strength(settings[1])
        bch = bch_angle_coefficient(r1, settings[0].theta, r2, settings[1].theta)
        if not self.K.stable:
            return _nan_record(coords, bch)
        t = self.transfer(omega)
        base = self.baseline(omega)
        if t is None or base is None:
            return _nan_record(coords, bch)
        try:
            v_q, v_t = self._covariances(t, settings, input_coupling)
            v = v_q + v_t
            e_n, _ = kernels.logneg(v)
            d_a1, d_opt = kernels.duan(v)
            delta = kernels.genoni_two_mode(v)
            kp, kt = kernels.kappa_sums(v)
        except ValueError:
            return _nan_record(coords, bch)
        tq = float(np.trace(v_q))
        tt = float(np.trace(v_t))
        ratio = tq / tt if tt > 0.0 else math.inf
        e_n0, d_a1_0, d_opt_0, delta0, kp0 = base
        return MetricRecord(
            coords=coords,
            e_n=float(e_n),
            duan_a1=float(d_a1),
            duan_opt=float(d_opt),
            genoni_delta=float(delta),
            delta_diff=float(delta - delta0),
            kappa_paper=float(kp),
            kappa_true=float(kt),
            kappa_diff=float(kp - kp0),
            quantum_noise_trace=tq,
            thermal_noise_trace=tt,
            noise_ratio=ratio,
            stable=True,
            bch_coefficient=float(bch),
            e_n_baseline=float(e_n0),
            duan_a1_baseline=float(d_a1_0),
            duan_opt_baseline=float(d_opt_0),
        )


def choose_analysis_frequency(cfg: PhysicalConfig, *,
                              noise_mode: str = "sideband_squeezed") -> float:
    """Analysis sideband frequency: configured value or a two-stage pre-scan.

    The pre-scan maximizes the unsqueezed log negativity over a log-spaced
    grid spanning [1e-5, 10] cavity half-linewidths, then refines linearly
    around the best point.  Falls back to the unsqueezed Duan value when the
    baseline log negativity vanishes everywhere.
    """
    if cfg.sideband_freq is not None:
        return cfg.sideband_freq
    engine = PointEngine(cfg, noise_mode=noise_mode)
    if not engine.K.stable:
        return engine.rates.gamma_c * 1e-3
    gamma_c = engine.rates.gamma_c

    def objective(om: float) -> tuple[float, float]:
        base = engine.baseline(om)
        if base is None:
            return (-math.inf, -math.inf)
        return (base[0], base[2])  # (e_n, duan_opt)

    coarse = np.geomspace(gamma_c * 1e-5, gamma_c * 10.0, 121)
    vals = [objective(om) for om in coarse]
    e_ns = np.array([v[0] for v in vals])
    duans = np.array([v[1] for v in vals])
    key = e_ns if e_ns.max() > 0 else duans
    i = int(np.argmax(key))
    lo = coarse[max(i - 1, 0)]
    hi = coarse[min(i + 1, len(coarse) - 1)]
    fine = np.linspace(lo, hi, 41)
    fvals = [objective(om) for om in fine]
    fkey = np.array([v[0] for v in fvals]) if e_ns.max() > 0 else \
        np.array([v[1] for v in fvals])
    return float(fine[int(np.argmax(fkey))])


def _run_indexed(n_points: int, work, threads: int | None) -> list:
    slots = [None] * n_points
    def run(i: int) -> None:
        slots[i] = work(i)
    if threads == 1:
        for i in range(n_points):
            run(i)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, range(n_points)))
    return slots


def _make_grid(axes, records, cfg, kind, omega, noise_mode, seed) -> MetricGrid:
    return MetricGrid(
        axes=tuple(axes),
        records=tuple(records),
        config=config_to_dict(cfg),
        kind=kind,
        analysis_omega=omega,
        noise_mode=noise_mode,
        seed=seed,
    )


def sweep_angles(cfg: PhysicalConfig, theta1_axis: SweepAxis, theta2_axis: SweepAxis,
                 *, noise_mode: str = "sideband_squeezed", threads: int | None = None,
                 seed: int = 0, kind: str = "angles") -> MetricGrid:
    """Full metric records over a (theta1, theta2) grid at fixed squeezing."""
    engine = PointEngine(cfg, noise_mode=noise_mode)
    omega = cfg.sideband_freq if cfg.sideband_freq is not None else \
        choose_analysis_frequency(cfg, noise_mode=noise_mode)
    engine.prepare([omega])
    r1 = squeeze_strength(cfg.squeezers[0])
    r2 = squeeze_strength(cfg.squeezers[1])
    t1s, t2s = theta1_axis.values, theta2_axis.values
    n2 = len(t2s)

    def work(i: int) -> MetricRecord:
        th1 = t1s[i // n2]
        th2 = t2s[i % n2]
        settings = (SqueezerSetting(theta=th1, r=r1), SqueezerSetting(theta=th2, r=r2))
        return engine.evaluate((th1, th2), omega, settings)

    records = _run_indexed(len(t1s) * n2, work, threads)
    return _make_grid((theta1_axis, theta2_axis), records, cfg, kind, omega,
                      noise_mode, seed)


def noise_ratio_map(cfg: PhysicalConfig, theta1_axis: SweepAxis, theta2_axis: SweepAxis,
                    **kwargs) -> MetricGrid:
    """Quantum/thermal output-noise ratio over an angle grid.

    Same records as sweep_angles; the ratio column divides the optical
    (vacuum + squeezed, plus mechanical zero-point) output trace by the
    thermal-occupancy one, with an infinite sentinel at zero temperature.
    """
    return sweep_angles(cfg, theta1_axis, theta2_axis, kind="noise-ratio", **kwargs)


def sweep_strength(cfg: PhysicalConfig, mu_axis: SweepAxis,
                   theta_fixed: tuple[float, float] | None = None,
                   *, noise_mode: str = "sideband_squeezed",
                   threads: int | None = None, seed: int = 0) -> MetricGrid:
    """Metric records versus nonlinearity mu, with r_j = mu * sqrt(P_j,input)."""
    if mu_axis.values[0] < 0 or mu_axis.values[-1] < 0:
        raise ValueError("mu axis must be nonnegative")
    p_in = [f.input_power_W for f in cfg.fields]
    if any(p is None for p in p_in):
        raise ConfigError("sweep_strength requires fields[].input_power_W")
    thetas = theta_fixed if theta_fixed is not None else \
        (cfg.squeezers[0].theta, cfg.squeezers[1].theta)
    engine = PointEngine(cfg, noise_mode=noise_mode)
    omega = cfg.sideband_freq if cfg.sideband_freq is not None else \
        choose_analysis_frequency(cfg, noise_mode=noise_mode)
    engine.prepare([omega])

    def work(i: int) -> MetricRecord:
        mu = mu_axis.values[i]
        settings = (
            SqueezerSetting(theta=thetas[0], mu=mu, pump_power_W=p_in[0]),
            SqueezerSetting(theta=thetas[1], mu=mu, pump_power_W=p_in[1]),
        )
        return engine.evaluate((mu,), omega, settings)

    records = _run_indexed(len(mu_axis), work, threads)
    return _make_grid((mu_axis,), records, cfg, "strength", omega, noise_mode, seed)


def sweep_frequency(cfg: PhysicalConfig, omega_axis: SweepAxis,
                    *, noise_mode: str = "sideband_squeezed",
                    threads: int | None = None, seed: int = 0) -> MetricGrid:
    """Metric records versus sideband frequency at the configured squeezing.

    Baseline (unsqueezed) columns are evaluated per frequency, so squeezed
    minus unsqueezed differences can be read directly off the grid.
    """
    if omega_axis.values[0] <= 0:
        raise ValueError("omega axis must be positive")
    engine = PointEngine(cfg, noise_mode=noise_mode)
    engine.prepare(omega_axis.values)

    def work(i: int) -> MetricRecord:
        om = omega_axis.values[i]
        return engine.evaluate((om,), om, cfg.squeezers)

    records = _run_indexed(len(omega_axis), work, threads)
    return _make_grid((omega_axis,), records, cfg, "frequency", None, noise_mode, seed)


def evaluate_single(cfg: PhysicalConfig, *, omega: float | None = None,
                    noise_mode: str = "sideband_squeezed") -> tuple[MetricRecord, float]:
    """One metric record at the configured squeezers; returns (record, omega)."""
    engine = PointEngine(cfg, noise_mode=noise_mode)
    if omega is None:
        omega = cfg.sideband_freq if cfg.sideband_freq is not None else \
            choose_analysis_frequency(cfg, noise_mode=noise_mode)
    record = engine.evaluate((), omega, cfg.squeezers)
    return record, omega


def _tmsv_record(coords, r: float, baseline: tuple | None) -> MetricRecord:
    """Metrics of two equally squeezed vacua (angles 0, pi/2) on a 50:50 splitter."""
    s0 = sideband_squeeze_matrix(r, 0.0)
    s1 = sideband_squeeze_matrix(r, math.pi / 2.0)
    v_in = np.zeros((4, 4))
    v_in[:2, :2] = s0 @ s0.T / 2.0
    v_in[2:, 2:] = s1 @ s1.T / 2.0
    v = beamsplitter_mix(v_in, 0.5)
    e_n, _ = kernels.logneg(v)
    d_a1, d_opt = kernels.duan(v)
    delta = kernels.genoni_two_mode(v)
    kp, kt = kernels.kappa_sums(v)
    if baseline is None:
        baseline = (e_n, d_a1, d_opt, delta, kp)
    e_n0, d_a1_0, d_opt_0, delta0, kp0 = baseline
    return MetricRecord(
        coords=coords,
        e_n=float(e_n), duan_a1=float(d_a1), duan_opt=float(d_opt),
        genoni_delta=float(delta), delta_diff=float(delta - delta0),
        kappa_paper=float(kp), kappa_true=float(kt), kappa_diff=float(kp - kp0),
        quantum_noise_trace=float(np.trace(v)), thermal_noise_trace=0.0,
        noise_ratio=math.inf, stable=True,
        bch_coefficient=bch_angle_coefficient(r, 0.0, r, math.pi / 2.0),
        e_n_baseline=float(e_n0), duan_a1_baseline=float(d_a1_0),
        duan_opt_baseline=float(d_opt_0),
    )


@dataclass(frozen=True)
class CompareResult:
    """Conventional-vs-optomechanical resource comparison over a mu axis."""

    conventional: MetricGrid
    omc_lossless: MetricGrid
    omc_coupled: MetricGrid
    optimal_angles: tuple[float, float]
    coupling: float  # power fraction of squeezed light coupled in the lossy arm

    def grids(self) -> dict[str, MetricGrid]:
        return {
            "conventional": self.conventional,
            "omc_lossless": self.omc_lossless,
            "omc_coupled": self.omc_coupled,
        }


def _refine_optimal_angles(engine: PointEngine, omega: float, mu: float,
                           p_in) -> tuple[float, float]:
    # two-stage search maximizing the gain-optimized Duan value of the
    # lossless squeezed arm: 32x32 coarse over [0, pi) (everything is
    # pi-periodic), then a 16x16 local refinement one coarse step wide
    def duan_at(th1: float, th2: float) -> float:
        settings = (SqueezerSetting(theta=th1, mu=mu, pump_power_W=p_in[0]),
                    SqueezerSetting(theta=th2, mu=mu, pump_power_W=p_in[1]))
        rec = engine.evaluate((), omega, settings)
        return rec.duan_opt if rec.stable else -math.inf

    coarse = np.linspace(0.0, math.pi, 32, endpoint=False)
    scores = np.array([[duan_at(a, b) for b in coarse] for a in coarse])
    ia, ib = np.unravel_index(int(np.argmax(scores)), scores.shape)
    step = math.pi / 32
    fine1 = np.linspace(coarse[ia] - step, coarse[ia] + step, 16)
    fine2 = np.linspace(coarse[ib] - step, coarse[ib] + step, 16)
    fscores = np.array([[duan_at(a, b) for b in fine2] for a in fine1])
    ja, jb = np.unravel_index(int(np.argmax(fscores)), fscores.shape)
    return float(fine1[ja]), float(fine2[jb])


def compare_conventional(cfg: PhysicalConfig, mu_axis: SweepAxis,
                         *, coupling_ppm: float = DEFAULT_COMPARE_COUPLING_PPM,
                         noise_mode: str = "sideband_squeezed",
                         threads: int | None = None, seed: int = 0) -> CompareResult:
    """Conventional crystal+beamsplitter arm versus squeezed-cavity arms.

    Per mu the conventional arm squeezes both vacua with r = mu*sqrt(p1+p2)
    (combined pump) and interferes them on a 50:50 beamsplitter; the cavity
    arms inject per-field squeezing r_j = mu*sqrt(p_j) at angles found by
    grid refinement, once with ideal input coupling and once with the
    configured coupling fraction (default 50 ppm).
    """
    if mu_axis.values[0] < 0:
        raise ValueError("mu axis must be nonnegative")
    p_in = [f.input_power_W for f in cfg.fields]
    if any(p is None for p in p_in):
        raise ConfigError("compare_conventional requires fields[].input_power_W")
    coupling = coupling_ppm * 1e-6
    engine = PointEngine(cfg, noise_mode=noise_mode)
    omega = cfg.sideband_freq if cfg.sideband_freq is not None else \
        choose_analysis_frequency(cfg, noise_mode=noise_mode)
    engine.prepare([omega])

    mu_ref = max(mu_axis.values)
    if mu_ref > 0 and engine.K.stable:
        angles = _refine_optimal_angles(engine, omega, mu_ref, p_in)
    else:
        angles = (0.0, 0.0)

    p_sum = p_in[0] + p_in[1]
    vac = _tmsv_record((0.0,), 0.0, None)
    conv_baseline = (vac.e_n, vac.duan_a1, vac.duan_opt, vac.genoni_delta,
                     vac.kappa_paper)
    conv_records = [_tmsv_record((mu,), mu * math.sqrt(p_sum), conv_baseline)
                    for mu in mu_axis.values]

    def omc_work(input_coupling):
        def work(i: int) -> MetricRecord:
            mu = mu_axis.values[i]
            settings = (
                SqueezerSetting(theta=angles[0], mu=mu, pump_power_W=p_in[0]),
                SqueezerSetting(theta=angles[1], mu=mu, pump_power_W=p_in[1]),
            )
            return engine.evaluate((mu,), omega, settings, input_coupling)
        return work

    lossless = _run_indexed(len(mu_axis), omc_work(1.0), threads)
    coupled = _run_indexed(len(mu_axis), omc_work(coupling), threads)

    return CompareResult(
        conventional=_make_grid((mu_axis,), conv_records, cfg,
                                "compare-conventional", omega, noise_mode, seed),
        omc_lossless=_make_grid((mu_axis,), lossless, cfg,
                                "compare-omc-lossless", omega, noise_mode, seed),
        omc_coupled=_make_grid((mu_axis,), coupled, cfg,
                               "compare-omc-coupled", omega, noise_mode, seed),
        optimal_angles=angles,
        coupling=coupling,
    )
