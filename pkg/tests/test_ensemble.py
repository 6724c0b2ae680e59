import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srmetro import (
    AtomEnsemble,
    ExcitationState,
    InvalidInputError,
    InvalidStateError,
    displace,
    drift,
    make_timed_dicke,
    overlap,
    sample_thermal_velocities,
)

finite = st.floats(-1e3, 1e3, allow_nan=False)
positions_st = st.lists(finite, min_size=1, max_size=30)


def test_empty_ensemble_rejected():
    with pytest.raises(InvalidInputError):
        AtomEnsemble([])


def test_velocity_length_mismatch_rejected():
    with pytest.raises(InvalidInputError):
        AtomEnsemble([0.0, 1.0], [1.0])


def test_nonfinite_position_rejected():
    with pytest.raises(InvalidInputError):
        AtomEnsemble([0.0, math.inf])


def test_arrays_are_read_only():
    ens = AtomEnsemble([1.0, 2.0])
    with pytest.raises(ValueError):
        ens.positions[0] = 5.0


def test_dicke_zero_wavenumber_is_uniform(rng):
    ens = AtomEnsemble(rng.uniform(0, 50, 7))
    s = make_timed_dicke(ens, "b", 0.0)
    np.testing.assert_allclose(s.amp_b, np.full(7, 1 / math.sqrt(7)))
    assert np.all(s.amp_a == 0)


def test_dicke_half_wavelength_flips_sign():
    k = 2.5
    lam = 2 * math.pi / k
    s = make_timed_dicke(AtomEnsemble([0.0, lam / 2]), "b", k)
    np.testing.assert_allclose(s.amp_b, [1 / math.sqrt(2), -1 / math.sqrt(2)], atol=1e-15)


def test_dicke_self_overlap_direct_sum(rng):
    ens = AtomEnsemble(rng.uniform(0, 1000, 20))
    s = make_timed_dicke(ens, "a", 0.0314)
    # direct summation, independent of numpy vdot
    total = sum(complex(a).conjugate() * complex(a) for a in s.amp_a)
    assert abs(total - 1) < 1e-12
    assert abs(overlap(s, s) - 1) < 1e-12


def test_dicke_rejects_bad_level():
    with pytest.raises(InvalidInputError):
        make_timed_dicke(AtomEnsemble([0.0]), "c", 1.0)


def test_orthogonal_levels():
    ens = AtomEnsemble([0.0, 0.3, 1.1])
    assert overlap(make_timed_dicke(ens, "b", 0), make_timed_dicke(ens, "a", 0)) == 0


def test_overlap_matches_direct_summation(rng):
    x = rng.uniform(-20, 20, 10)
    k, kp = 0.7, -1.9
    ens = AtomEnsemble(x)
    got = overlap(make_timed_dicke(ens, "b", k), make_timed_dicke(ens, "b", kp))
    expected = sum(math.cos((kp - k) * xj) + 1j * math.sin((kp - k) * xj) for xj in x) / len(x)
    assert abs(got - expected) < 1e-12


def test_overlap_size_mismatch():
    s1 = make_timed_dicke(AtomEnsemble([0.0]), "b", 0)
    s2 = make_timed_dicke(AtomEnsemble([0.0, 1.0]), "b", 0)
    with pytest.raises(InvalidInputError):
        overlap(s1, s2)


def test_displace():
    ens = AtomEnsemble([1.0, 2.0], [0.1, 0.2])
    assert displace(ens, 0.0).positions.tolist() == [1.0, 2.0]
    moved = displace(ens, 0.5)
    assert moved.positions.tolist() == [1.5, 2.5]
    assert moved.velocities.tolist() == [0.1, 0.2]
    np.testing.assert_allclose(displace(moved, -0.5).positions, ens.positions, atol=1e-12)


def test_drift():
    ens = AtomEnsemble([0.0, 0.0], [1.0, -1.0])
    assert drift(ens, 0.0).positions.tolist() == [0.0, 0.0]
    assert drift(ens, 2.0).positions.tolist() == [2.0, -2.0]


def test_uniform_drift_is_displacement():
    ens = AtomEnsemble([0.3, 1.7, -4.0], [0.25, 0.25, 0.25])
    assert np.array_equal(drift(ens, 4.0).positions, displace(ens, 1.0).positions)


def test_drift_needs_velocities():
    with pytest.raises(InvalidStateError):
        drift(AtomEnsemble([0.0]), 1.0)


def test_thermal_velocities_zero_temperature():
    v = sample_thermal_velocities(np.random.default_rng(0), 0.0, 5)
    assert np.all(v == 0)


def test_thermal_velocities_spread():
    v = sample_thermal_velocities(np.random.default_rng(7), 0.01, 100_000)
    assert abs(v.std() / (0.01 / math.sqrt(2)) - 1) < 0.01


def test_thermal_velocities_deterministic():
    a = sample_thermal_velocities(np.random.default_rng(3), 0.5, 50)
    b = sample_thermal_velocities(np.random.default_rng(3), 0.5, 50)
    assert np.array_equal(a, b)


def test_thermal_velocities_negative_vm():
    with pytest.raises(InvalidInputError):
        sample_thermal_velocities(np.random.default_rng(0), -1.0, 3)


@given(positions_st, finite, st.sampled_from("ab"))
def test_dicke_unit_norm(positions, k, level):
    s = make_timed_dicke(AtomEnsemble(positions), level, k)
    assert abs(s.norm() - 1) < 1e-12


@given(positions_st, finite, finite)
def test_overlap_conjugate_symmetric(positions, k, kp):
    ens = AtomEnsemble(positions)
    s1, s2 = make_timed_dicke(ens, "b", k), make_timed_dicke(ens, "b", kp)
    assert abs(overlap(s1, s2) - overlap(s2, s1).conjugate()) < 1e-12
    assert abs(abs(overlap(s1, s1)) - 1) < 1e-12


@settings(max_examples=50)
@given(st.lists(st.floats(-100, 100), min_size=1, max_size=30), st.floats(-5, 5), st.floats(-50, 50))
def test_displacement_attaches_phase(positions, k, d):
    ens = AtomEnsemble(positions)
    moved = make_timed_dicke(displace(ens, d), "b", k)
    phased = make_timed_dicke(ens, "b", k).scaled(np.exp(1j * k * d))
    assert abs(overlap(moved, phased) - 1) < 1e-12


def test_state_vector_roundtrip(rng):
    from conftest import random_state

    s = random_state(rng, 4)
    back = ExcitationState.from_vector(s.to_vector())
    assert np.array_equal(back.amp_b, s.amp_b) and np.array_equal(back.amp_a, s.amp_a)
