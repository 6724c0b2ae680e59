import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import K1
from srmetro import (
    FitDegeneracyError,
    FringeScan,
    InvalidInputError,
    NoFringeError,
    NoiseParams,
    ProtocolConfig,
    apply_retention,
    fit_cosine,
    scan_fringe,
    sensitivity_from_fit,
)
from srmetro.analysis import FitResult, default_r0_grid


def _synthetic(v, f, th, points=90, span=None):
    span = span if span is not None else 3 * math.pi / f
    x = np.linspace(0, span, points)
    return FringeScan(x, -v * np.cos(f * x + th))


@settings(max_examples=40, deadline=None)
@given(
    v=st.floats(0.05, 1.0),
    f=st.floats(4.0, 200.0),
    th=st.floats(-3.0, 3.0),
)
def test_fit_recovers_noise_free_cosine(v, f, th):
    fit = fit_cosine(_synthetic(v, f, th), f * 1.04)
    assert fit.visibility == pytest.approx(v, abs=1e-8)
    assert fit.frequency == pytest.approx(f, rel=1e-8)
    assert math.cos(fit.phase - th) == pytest.approx(1.0, abs=1e-8)
    assert fit.residual_rms < 1e-8


def test_fit_example():
    x = np.linspace(0, 0.25, 50)
    fit = fit_cosine(FringeScan(x, -0.82 * np.cos(40 * x)), 40)
    assert fit.visibility == pytest.approx(0.82, abs=1e-12)
    assert fit.frequency == pytest.approx(40, abs=1e-10)
    assert abs(fit.phase) < 1e-10


def test_fit_weighted_noisy_data():
    rng = np.random.default_rng(3)
    x = np.linspace(0, 0.3, 120)
    se = np.full_like(x, 0.02)
    y = -0.7 * np.cos(32 * x + 0.3) + rng.normal(0, 0.02, x.size)
    fit = fit_cosine(FringeScan(x, y, "mc", se), 32)
    assert abs(fit.visibility - 0.7) < 4 * fit.visibility_err
    assert abs(fit.frequency - 32) < 4 * fit.frequency_err
    assert 0 < fit.visibility_err < 0.01


def test_fit_too_few_points():
    x = np.linspace(0, 1, 4)
    with pytest.raises(FitDegeneracyError):
        fit_cosine(FringeScan(x, np.cos(x)), 10)


def test_fit_span_too_short():
    x = np.linspace(0, 0.01, 20)
    with pytest.raises(FitDegeneracyError):
        fit_cosine(FringeScan(x, np.cos(40 * x)), 40)


def test_fit_bad_hint():
    x = np.linspace(0, 1, 20)
    with pytest.raises(InvalidInputError):
        fit_cosine(FringeScan(x, np.cos(x)), 0)


def test_scan_validation():
    with pytest.raises(InvalidInputError):
        FringeScan([0.0, 0.0, 1.0], [1, 2, 3])
    with pytest.raises(InvalidInputError):
        FringeScan([0.0, 1.0], [1.0])
    with pytest.raises(InvalidInputError):
        FringeScan([], [])
    with pytest.raises(InvalidInputError):
        FringeScan([0.0], [1.0], source="guess")


def test_sensitivity_example():
    rep = sensitivity_from_fit(FitResult(0.5, 40.0, 0.0, 0.0), 10)
    assert rep.delta == pytest.approx(1 / 20)
    assert rep.heisenberg == 1 / 40
    assert rep.shot_noise == pytest.approx(1 / math.sqrt(40))
    assert rep.ratio_to_heisenberg == pytest.approx(2)


def test_sensitivity_no_fringe():
    with pytest.raises(NoFringeError):
        sensitivity_from_fit(FitResult(0.0, 40.0, 0.0, 0.0), 10)


def test_sensitivity_error_propagation():
    rep = sensitivity_from_fit(FitResult(0.8, 64.0, 0.0, 0.0, visibility_err=0.008), 16)
    assert rep.delta_err == pytest.approx(rep.delta * 0.01)


@pytest.mark.parametrize("n", [1, 3, 8, 32])
def test_ideal_scan_is_heisenberg(n):
    cfg = ProtocolConfig(n_pairs=n, k1=K1, n_atoms=8)
    scan = scan_fringe(cfg, default_r0_grid(n, K1, points_per_period=20))
    assert scan.source == "ideal"
    np.testing.assert_allclose(scan.P, -np.cos(4 * n * scan.grid), atol=1e-10)
    rep = sensitivity_from_fit(fit_cosine(scan, 4 * n), n)
    assert rep.delta == pytest.approx(1 / (4 * n), rel=1e-9)


def test_single_point_scan():
    cfg = ProtocolConfig(n_pairs=2, k1=K1, n_atoms=4)
    scan = scan_fringe(cfg, [0.05])
    assert scan.P[0] == pytest.approx(-math.cos(8 * K1 * 0.05), abs=1e-12)


def test_mc_zero_noise_scan_equals_ideal():
    grid = default_r0_grid(4, K1, points_per_period=10)
    ideal = scan_fringe(ProtocolConfig(n_pairs=4, k1=K1, n_atoms=8), grid)
    mc = scan_fringe(ProtocolConfig(n_pairs=4, k1=K1, n_atoms=8, noise=NoiseParams()), grid, trials=2)
    assert mc.source == "mc"
    np.testing.assert_allclose(mc.P, ideal.P, atol=1e-10)


def test_retention_scales_visibility_only():
    n = 4
    grid = default_r0_grid(n, K1, points_per_period=20)
    base = fit_cosine(scan_fringe(ProtocolConfig(n_pairs=n, k1=K1, n_atoms=8), grid), 4 * n)
    for eta in (1.0, 0.9, 0.5, 0.1):
        cfg = ProtocolConfig(n_pairs=n, k1=K1, n_atoms=8, noise=NoiseParams(retention=eta))
        fit = fit_cosine(scan_fringe(cfg, grid, trials=1), 4 * n)
        assert fit.visibility == pytest.approx(eta * base.visibility, rel=1e-9)
        assert fit.frequency == pytest.approx(base.frequency, rel=1e-9)
        rep = sensitivity_from_fit(fit, n)
        assert rep.delta == pytest.approx(1 / (4 * n * eta), rel=1e-9)


def test_apply_retention_validation():
    scan = FringeScan([0.0, 1.0], [1.0, -1.0])
    with pytest.raises(InvalidInputError):
        apply_retention(scan, 0.0)
    with pytest.raises(InvalidInputError):
        apply_retention(scan, 1.5)
    assert np.array_equal(apply_retention(scan, 0.5).P, [0.5, -0.5])


def test_default_grid():
    g = default_r0_grid(4, K1)
    assert g.size == 90 and g[0] == 0
    assert (g[1] - g[0]) * 60 == pytest.approx(2 * math.pi / (16 * K1))
    with pytest.raises(InvalidInputError):
        default_r0_grid(0, K1)


def test_scan_grid_validation():
    cfg = ProtocolConfig(n_pairs=2, k1=K1, n_atoms=4)
    with pytest.raises(InvalidInputError):
        scan_fringe(cfg, [])
    with pytest.raises(InvalidInputError):
        scan_fringe(cfg, [0.2, 0.1])
