import math

import numpy as np
import pytest

from pondera.gaussianity import (
    CumulantTensor,
    bch_angle_coefficient,
    delta_difference,
    fourth_cumulant,
    genoni_delta,
    kappa_magnitude,
    point_seed,
    sample_homodyne,
)

from conftest import make_tmsv, random_physical_cov

THERMAL_N1 = np.diag([1.5, 1.5])  # single-mode nbar = 1


# ------------------------------------------------------------------ Genoni delta

def test_vacuum_delta_zero():
    assert genoni_delta(np.eye(4) / 2) == pytest.approx(0.0, abs=1e-12)


def test_thermal_delta_closed_form():
    assert genoni_delta(THERMAL_N1) == pytest.approx(2 * math.log(2), abs=1e-12)


def test_tmsv_delta_zero():
    for s in (0.1, 0.5, 1.0):
        assert genoni_delta(make_tmsv(s)) == pytest.approx(0.0, abs=1e-10)


def test_delta_additive_over_direct_sums():
    rng = np.random.default_rng(2)
    for _ in range(20):
        va = random_physical_cov(rng, 4)
        vb = random_physical_cov(rng, 2)
        v = np.zeros((6, 6))
        v[:4, :4] = va
        v[4:, 4:] = vb
        assert genoni_delta(v) == pytest.approx(
            genoni_delta(va) + genoni_delta(vb), abs=1e-9)


def test_delta_difference_cases():
    assert delta_difference(THERMAL_N1, THERMAL_N1) == 0.0
    assert delta_difference(np.eye(2) / 2, THERMAL_N1) == pytest.approx(
        -2 * math.log(2), abs=1e-12)
    assert delta_difference(make_tmsv(0.4), np.eye(4) / 2) == pytest.approx(
        0.0, abs=1e-10)


def test_delta_rejects_unphysical():
    with pytest.raises(ValueError, match="unphysical"):
        genoni_delta(np.eye(2) / 4)


# ------------------------------------------------------------------- cumulants

def test_vacuum_paper_literal_entries():
    k = fourth_cumulant(np.eye(4) / 2, "paper_literal").entries
    assert k[0, 0, 0, 0] == pytest.approx(0.0, abs=1e-15)
    assert k[0, 0, 1, 1] == pytest.approx(-0.5, abs=1e-15)


def test_vacuum_paper_literal_magnitude_brute_force():
    """Magnitude of the vacuum paper-literal tensor against a direct
    element-by-element enumeration (frozen independently at 12.0)."""
    v = np.eye(4) / 2
    total = 0.0
    for j in range(4):
        for kk in range(4):
            for l in range(4):
                for p in range(4):
                    m4 = v[j, kk] * v[l, p] + v[j, l] * v[kk, p] + v[j, p] * v[kk, l]
                    total += abs(m4 - 3 * v[j, kk] * v[l, p])
    assert total == pytest.approx(12.0, abs=1e-12)
    tensor = fourth_cumulant(v, "paper_literal")
    assert kappa_magnitude(tensor) == pytest.approx(total, abs=1e-12)


def test_true_multivariate_vanishes_for_gaussians():
    rng = np.random.default_rng(4)
    for _ in range(100):
        v = random_physical_cov(rng, 4)
        k = fourth_cumulant(v, "true_multivariate")
        assert np.abs(k.entries).max() < 1e-12 * max(1.0, np.abs(v).max() ** 2)


def test_paper_literal_symmetries():
    rng = np.random.default_rng(9)
    v = random_physical_cov(rng, 4)
    k = fourth_cumulant(v, "paper_literal").entries
    tol = 1e-12 * np.abs(k).max()  # summation order differs across transposes
    assert np.abs(k - k.transpose(1, 0, 2, 3)).max() < tol  # j <-> k
    assert np.abs(k - k.transpose(0, 1, 3, 2)).max() < tol  # l <-> p
    # not symmetric under arbitrary index exchange (unlike a true cumulant)
    assert np.abs(k - k.transpose(0, 2, 1, 3)).max() > 1e-3


def test_kappa_magnitude_zero_tensor():
    zero = CumulantTensor(np.zeros((4, 4, 4, 4)), "paper_literal", "analytic_wick")
    assert kappa_magnitude(zero) == 0.0


def test_kappa_difference_of_identical_states():
    v = make_tmsv(0.3)
    a = kappa_magnitude(fourth_cumulant(v, "paper_literal"))
    b = kappa_magnitude(fourth_cumulant(v, "paper_literal"))
    assert a - b == 0.0


def test_cumulant_validates_arguments():
    with pytest.raises(ValueError, match="estimator"):
        fourth_cumulant(np.eye(4) / 2, "bogus")
    with pytest.raises(ValueError, match="source"):
        fourth_cumulant(np.eye(4) / 2, "paper_literal", "tea_leaves")
    with pytest.raises(ValueError, match="4 quadratures"):
        fourth_cumulant(np.eye(2) / 2)


# ----------------------------------------------------------------- Monte Carlo

def test_sample_covariance_consistency():
    n = 10**6
    x = sample_homodyne(np.eye(4) / 2, n, seed=1)
    emp = x.T @ x / n
    # standard error of each covariance entry of vacuum is ~ 1/2 sqrt(2/n)
    tol = 5 * math.sqrt(2.0 / n) / 2
    assert np.abs(emp - np.eye(4) / 2).max() < tol


def test_sampling_is_deterministic():
    v = make_tmsv(0.2)
    a = sample_homodyne(v, 1000, seed=42)
    b = sample_homodyne(v, 1000, seed=42)
    assert np.array_equal(a, b)
    c = sample_homodyne(v, 1000, seed=43)
    assert not np.array_equal(a, c)


def test_sampling_rejects_bad_inputs():
    with pytest.raises(ValueError, match="positive definite"):
        sample_homodyne(np.diag([1.0, -1.0]), 10, seed=0)
    with pytest.raises(ValueError, match=">= 1"):
        sample_homodyne(np.eye(2) / 2, 0, seed=0)


def test_monte_carlo_kappa_matches_wick():
    """Empirical paper-literal cumulants on a TMSV agree with the analytic
    Wick evaluation within 5 standard errors per entry."""
    v = make_tmsv(0.3)
    n = 200_000
    mc = fourth_cumulant(v, "paper_literal", "monte_carlo", n_samples=n, seed=7)
    wick = fourth_cumulant(v, "paper_literal")
    x = sample_homodyne(v, n, seed=7)
    for j in range(4):
        for k in range(4):
            for l in range(4):
                for p in range(4):
                    prod = x[:, j] * x[:, k] * x[:, l] * x[:, p]
                    se_m4 = prod.std() / math.sqrt(n)
                    diff = abs(mc.entries[j, k, l, p] - wick.entries[j, k, l, p])
                    # the subtracted empirical second moments add same-order
                    # noise on top of the fourth-moment standard error
                    assert diff < 7 * se_m4 + 1e-9


def test_monte_carlo_error_shrinks_with_samples():
    v = make_tmsv(0.3)
    wick = fourth_cumulant(v, "paper_literal").entries
    err = {}
    for n in (10**4, 10**6):
        mc = fourth_cumulant(v, "paper_literal", "monte_carlo",
                             n_samples=n, seed=11)
        err[n] = np.abs(mc.entries - wick).max()
    # ~n^(-1/2) scaling: two orders in n is a factor ~10 in error
    assert err[10**6] < err[10**4] * 0.5


def test_monte_carlo_metadata_recorded():
    mc = fourth_cumulant(np.eye(4) / 2, "true_multivariate", "monte_carlo",
                         n_samples=5000, seed=3)
    assert mc.n_samples == 5000 and mc.seed == 3 and mc.source == "monte_carlo"


# ---------------------------------------------------------------- BCH diagnostic

def test_bch_coefficient_cases():
    assert bch_angle_coefficient(0.3, 1.1, 0.3, 1.1) == 0.0
    assert bch_angle_coefficient(0.0, 0.0, 0.5, 2.0) == 0.0
    assert bch_angle_coefficient(0.3, math.pi / 2, 0.3, 0.0) == pytest.approx(
        0.36, abs=1e-12)


def test_bch_coefficient_properties():
    rng = np.random.default_rng(6)
    for _ in range(50):
        r1, r2 = rng.uniform(0, 1, 2)
        th, ph = rng.uniform(0, 2 * math.pi, 2)
        k = bch_angle_coefficient(r1, th, r2, ph)
        assert bch_angle_coefficient(r1, th + 2 * math.pi, r2, ph) == pytest.approx(
            k, abs=1e-9)
        assert bch_angle_coefficient(r2, ph, r1, th) == pytest.approx(-k, abs=1e-12)
    with pytest.raises(ValueError):
        bch_angle_coefficient(-1.0, 0.0, 1.0, 0.0)


def test_point_seed_depends_on_both_arguments():
    assert point_seed(0, 1) != point_seed(0, 2)
    assert point_seed(1, 1) != point_seed(0, 1)
    assert point_seed(5, 9) == point_seed(5, 9)
