"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines as they execute.  Tolerances are fixed here, not calibrated at run
time.  Where a tolerance meets the floating-point conditioning floor of a
large-magnitude column, the deviation is measured relative to that column's
scale; each such case is commented in place.
"""

import dataclasses
import json
import math
import time

import numpy as np
import pytest

from pondera.cli import main as cli_main
from pondera.dynamics import (
    build_coupling_matrix,
    decompose_noise_contributions,
    input_noise_spectrum,
    output_covariance,
    thermal_quantum_split,
)
from pondera.entanglement import duan_measure, log_negativity, symplectic_eigenvalues
from pondera.gaussianity import fourth_cumulant, genoni_delta, sample_homodyne
from pondera.params import SqueezerSetting, config_from_dict, derive_rates
from pondera.sweeps import METRIC_FIELDS, PointEngine, SweepAxis, compare_conventional, sweep_angles

from conftest import make_tmsv, random_physical_cov, random_single_mode_cov

GRID_N = 64


def report(number: int, description: str, ok: bool, detail: str = "") -> None:
    line = f"[criterion {number:>2}] {'PASS' if ok else 'FAIL'} - {description}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


def empty_cavity_config(table1_doc):
    doc = json.loads(json.dumps(table1_doc))
    for f in doc["fields"]:
        f["circulating_power_W"] = 0.0
    doc["loss_ppm"] = 0.0
    doc["input_transmission_ppm"] = 50.0
    for s in doc["squeezers"]:
        s["r"] = 0.0
    return config_from_dict(doc)


@pytest.fixture(scope="module")
def table1_grid(table1_cfg):
    """64x64 angle grid at Table-1 parameters (r = 0.8, T = 4 K), 8 threads."""
    step = 2 * math.pi / GRID_N
    axis = lambda name: SweepAxis(name, tuple(i * step for i in range(GRID_N)), "rad")
    t0 = time.monotonic()
    grid = sweep_angles(table1_cfg, axis("theta1"), axis("theta2"), threads=8)
    return grid, time.monotonic() - t0


def test_criterion_01_tmsv_analytic_oracle():
    worst_en = worst_duan = 0.0
    for r in (0.1, 0.3, 0.5, 1.0):
        v = make_tmsv(r)
        worst_en = max(worst_en, abs(log_negativity(v) - 2 * r))
        worst_duan = max(worst_duan, abs(duan_measure(v) - (1 - math.exp(-2 * r))))
    report(1, "TMSV oracle: E_N = 2r and duan = 1 - exp(-2r) within 1e-9",
           worst_en < 1e-9 and worst_duan < 1e-9,
           f"max E_N err {worst_en:.2e}, max duan err {worst_duan:.2e}")


def test_criterion_02_vacuum_fixed_point(table1_doc):
    cfg = empty_cavity_config(table1_doc)
    rates = derive_rates(cfg)
    K = build_coupling_matrix(rates, cfg)
    g = input_noise_spectrum(cfg, rates)
    worst = 0.0
    for om in np.geomspace(1e-2, 1e8, 20):
        v = output_covariance(K, g, float(om), rates.gamma_c)
        worst = max(worst, np.abs(v - np.eye(4) / 2).max())
    report(2, "vacuum fixed point |V - I/2| < 1e-10 at 20 log-spaced frequencies",
           worst < 1e-10, f"max deviation {worst:.2e}")


def test_criterion_03_physicality_sweep(table1_grid, table1_cfg):
    grid, elapsed = table1_grid
    stable = [r for r in grid.records if r.stable]
    engine = PointEngine(table1_cfg)
    om = grid.analysis_omega
    engine.prepare([om])
    t = engine.transfer(om)
    min_nu = math.inf
    for rec in stable:
        th1, th2 = rec.coords
        settings = (SqueezerSetting(th1, 0.8), SqueezerSetting(th2, 0.8))
        v_q, v_t = engine._covariances(t, settings, 1.0)
        min_nu = min(min_nu, symplectic_eigenvalues(v_q + v_t).min())
    ok = (len(stable) == len(grid.records)
          and min_nu >= 0.5 - 1e-9
          and elapsed < 60.0)
    report(3, "64x64 Table-1 sweep: all points physical, runtime < 60 s",
           ok, f"min nu - 1/2 = {min_nu - 0.5:.2e}, runtime {elapsed:.1f} s")


def test_criterion_04_periodicity(table1_grid):
    grid, _ = table1_grid
    worst = 0.0
    worst_col = ""
    kappa_scale = max(1.0, float(np.nanmax(np.abs(grid.column("kappa_paper")))))
    for name in METRIC_FIELDS:
        if name == "stable":
            continue
        if name == "bch_coefficient":
            # the angle-difference diagnostic is 4 r1 r2 sin(theta1 - theta2):
            # odd, not periodic, under a pi shift of one angle by its own
            # closed form, so it is excluded from the covariance-periodicity
            # check (see the decisions ledger)
            continue
        col = grid.column(name)
        dev = max(np.nanmax(np.abs(col - np.roll(col, GRID_N // 2, axis=0))),
                  np.nanmax(np.abs(col - np.roll(col, GRID_N // 2, axis=1))))
        # tolerance is relative to the column magnitude: kappa columns reach
        # ~5e5 where an absolute 1e-9 would sit below the double-precision
        # conditioning floor; kappa_true is a pure cancellation residue and
        # is measured against the kappa tensor scale
        scale = kappa_scale if name == "kappa_true" else \
            max(1.0, float(np.nanmax(np.abs(col))))
        rel = dev / scale
        if rel > worst:
            worst, worst_col = rel, name
    report(4, "pi-periodicity of every metric column < 1e-9 of column scale",
           worst < 1e-9, f"worst column {worst_col}: {worst:.2e}")


def test_criterion_04b_extrema_on_half_pi_lattice(table1_grid):
    """Qualitative paper check: E_N extrema on the pi/2 angle lattice.

    Within this model the optimum input squeezing angle pre-compensates the
    intracavity quadrature rotation atan(detuning)/2 per field, so with the
    Table-1 detunings (0.3, -1.5) the extrema sit ~0.05 pi and ~0.19 pi off
    the lattice.  The check is implemented exactly as stated and is expected
    to fail; see the decisions ledger for the analysis.
    """
    grid, _ = table1_grid
    step = 2 * math.pi / GRID_N
    en = grid.column("e_n")
    i, j = np.unravel_index(int(np.nanargmax(en)), en.shape)
    coords = (grid.axes[0].values[i], grid.axes[1].values[j])
    dists = [abs(c - round(c / (math.pi / 2)) * (math.pi / 2)) for c in coords]
    report(4, "E_N maxima on the pi/2 lattice within one grid step "
              "(documented model deviation)",
           max(dists) <= step + 1e-12,
           f"lattice distances {dists[0]/step:.1f}, {dists[1]/step:.1f} grid steps")


def test_criterion_05_enhancement_ratio(table1_grid):
    grid, _ = table1_grid
    e_max = float(np.nanmax(grid.column("e_n")))
    e_base = grid.records[0].e_n_baseline
    ratio = e_max / e_base
    report(5, "max E_N(r=0.8) / E_N(r=0) in [3, 10] at Table-1 parameters",
           3.0 <= ratio <= 10.0, f"ratio {ratio:.2f}")


def test_criterion_06_gaussianity_identities():
    d_vac = genoni_delta(np.eye(4) / 2)
    d_tmsv = max(abs(genoni_delta(make_tmsv(s))) for s in (0.1, 0.5, 1.0))
    d_th = abs(genoni_delta(np.diag([1.5, 1.5])) - 2 * math.log(2))
    rng = np.random.default_rng(123)
    worst_kappa = 0.0
    for _ in range(100):
        v = random_physical_cov(rng, 4)
        worst_kappa = max(worst_kappa,
                          np.abs(fourth_cumulant(v, "true_multivariate").entries).max())
    ok = (abs(d_vac) < 1e-10 and d_tmsv < 1e-10 and d_th < 1e-9
          and worst_kappa < 1e-12)
    report(6, "Gaussianity identities: pure states delta=0, thermal 2 ln 2, "
              "true cumulant tensor = 0",
           ok, f"delta errs {abs(d_vac):.1e}/{d_tmsv:.1e}/{d_th:.1e}, "
               f"kappa {worst_kappa:.1e}")


def test_criterion_07_monte_carlo_consistency():
    t0 = time.monotonic()
    v = make_tmsv(0.3)
    n = 10**6
    x = sample_homodyne(v, n, seed=0)
    wick = (np.einsum("jk,lp->jklp", v, v)
            + np.einsum("jl,kp->jklp", v, v)
            + np.einsum("jp,kl->jklp", v, v))
    worst_sigma = 0.0
    for j in range(4):
        for k in range(4):
            for l in range(4):
                for p in range(4):
                    prod = x[:, j] * x[:, k] * x[:, l] * x[:, p]
                    se = prod.std() / math.sqrt(n)
                    pull = abs(prod.mean() - wick[j, k, l, p]) / se
                    worst_sigma = max(worst_sigma, pull)
    elapsed = time.monotonic() - t0
    report(7, "empirical fourth moments within 5 standard errors of Wick "
              "values (all 256 tuples), runtime < 30 s",
           worst_sigma < 5.0 and elapsed < 30.0,
           f"worst pull {worst_sigma:.2f} sigma, runtime {elapsed:.1f} s")


def test_criterion_08_linearity(table1_cfg):
    rates = derive_rates(table1_cfg)
    K = build_coupling_matrix(rates, table1_cfg)
    om = 10.0
    step = 2 * math.pi / 16
    worst = 0.0
    for i in range(16):
        for j in range(16):
            cfg = dataclasses.replace(
                table1_cfg,
                squeezers=(SqueezerSetting(i * step, 0.8),
                           SqueezerSetting(j * step, 0.8)))
            gq, gt = thermal_quantum_split(cfg, rates)
            parts = decompose_noise_contributions(K, [gq, gt], om, rates.gamma_c)
            total = output_covariance(K, input_noise_spectrum(cfg, rates), om,
                                      rates.gamma_c)
            worst = max(worst, np.abs(sum(parts) - total).max())
    report(8, "noise decomposition parts sum to the total V within 1e-12 "
              "on a 16x16 grid",
           worst < 1e-12, f"max deviation {worst:.2e}")


def test_criterion_09_duan_soundness():
    rng = np.random.default_rng(321)
    worst = -math.inf
    for _ in range(1000):
        v = np.zeros((4, 4))
        v[:2, :2] = random_single_mode_cov(rng)
        v[2:, 2:] = random_single_mode_cov(rng)
        worst = max(worst, duan_measure(v))
    report(9, "duan value <= 0 + 1e-9 for 1000 random product states",
           worst <= 1e-9, f"max duan {worst:.2e}")


def test_criterion_10_resource_comparison(table1_cfg):
    mu_ax = SweepAxis("mu", tuple(float(v) for v in np.linspace(0.0, 20.0, 9)),
                      "W^-1/2")
    res = compare_conventional(table1_cfg, mu_ax, coupling_ppm=50.0, threads=8)
    base = res.omc_coupled.records[0].duan_opt_baseline
    base_en = res.omc_coupled.records[0].e_n_baseline
    flat = max(abs(r.duan_opt - base) / abs(base) for r in res.omc_coupled.records)
    flat_en = max(abs(r.e_n - base_en) / abs(base_en)
                  for r in res.omc_coupled.records)
    lossless = [r.duan_opt for r in res.omc_lossless.records]
    grows = all(b > a for a, b in zip(lossless, lossless[1:]))
    ok = flat <= 0.01 and flat_en <= 0.01 and grows
    report(10, "50 ppm input coupling pins the squeezed arm to its r=0 "
               "baseline within 1%; lossless arm strictly increases",
           ok, f"coupled-arm deviation {max(flat, flat_en):.2e}, "
               f"lossless monotone: {grows}")


def test_criterion_11_reproduce_determinism(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    rc1 = cli_main(["reproduce", "fig3", "--out-dir", str(out1), "--threads", "8"])
    rc2 = cli_main(["reproduce", "fig3", "--out-dir", str(out2), "--threads", "3"])
    same = (out1 / "grid.csv").read_bytes() == (out2 / "grid.csv").read_bytes()
    report(11, "reproduce fig3 twice yields byte-identical CSVs",
           rc1 == 0 and rc2 == 0 and same,
           "identical" if same else "CSV bytes differ")
