import math

import numpy as np
import pytest
import scipy.linalg

from conftest import K1, random_state
from srmetro import AtomEnsemble, OracleScaleError, Pulse, apply_pulse, make_timed_dicke
from srmetro.errors import InvalidInputError
from srmetro.oracle import expm, expm_apply, full_space_check, generator_matrix


def test_zero_area_generator():
    g = generator_matrix(AtomEnsemble([0.0, 1.0]), Pulse(0.0, 2.0, 1.0))
    assert not np.any(g.matrix)


def test_single_atom_pi_generator():
    g = generator_matrix(AtomEnsemble([0.0]), Pulse(math.pi, 3.0, 0.0))
    np.testing.assert_allclose(g.matrix, [[0, math.pi / 2], [math.pi / 2, 0]])


def test_generator_structure(rng):
    ens = AtomEnsemble(rng.uniform(-5, 5, 3))
    g = generator_matrix(ens, Pulse(rng.uniform(0, 6), rng.uniform(-3, 3), rng.uniform(-3, 3)))
    assert g.hermiticity_error() <= 1e-14
    mask = np.zeros((6, 6), dtype=bool)
    for j in range(3):
        mask[j, 3 + j] = mask[3 + j, j] = True
    assert not np.any(g.matrix[~mask])


def test_generator_size_guard():
    with pytest.raises(OracleScaleError):
        generator_matrix(AtomEnsemble(np.zeros(65)), Pulse(math.pi))


def test_expm_zero_is_identity(rng):
    s = random_state(rng, 4)
    g = generator_matrix(AtomEnsemble(np.zeros(4)), Pulse(0.0))
    np.testing.assert_array_equal(expm_apply(g, s).to_vector(), s.to_vector())


def test_expm_matches_scipy(rng):
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    a = 3 * (a + a.conj().T)
    np.testing.assert_allclose(expm(1j * a), scipy.linalg.expm(1j * a), atol=1e-11)


def test_expm_preserves_norm(rng):
    ens = AtomEnsemble(rng.uniform(-5, 5, 8))
    g = generator_matrix(ens, Pulse(5.9, 2.2, 0.3))
    out = expm_apply(g, random_state(rng, 8))
    assert abs(out.norm() - 1) < 1e-11


def test_expm_emission_pulse(rng):
    ens = AtomEnsemble(rng.uniform(0, 10, 5))
    out = expm_apply(generator_matrix(ens, Pulse(math.pi, K1)), make_timed_dicke(ens, "b", 0))
    expected = make_timed_dicke(ens, "a", -K1).scaled(1j)
    assert np.max(np.abs(out.to_vector() - expected.to_vector())) < 1e-10


def test_expm_dimension_mismatch(rng):
    g = generator_matrix(AtomEnsemble([0.0, 1.0]), Pulse(1.0))
    with pytest.raises(InvalidInputError):
        expm_apply(g, random_state(rng, 3))


def test_closed_form_matches_oracle_random(rng):
    worst = 0.0
    for _ in range(50):
        ens = AtomEnsemble(rng.uniform(-20, 20, 5))
        pulse = Pulse(rng.uniform(0, 4 * math.pi), rng.uniform(-4, 4), rng.uniform(-math.pi, math.pi))
        s = random_state(rng, 5)
        a = apply_pulse(s, ens, pulse).to_vector()
        b = expm_apply(generator_matrix(ens, pulse), s).to_vector()
        worst = max(worst, np.max(np.abs(a - b)))
    assert worst < 1e-9


@pytest.mark.parametrize(
    "n_atoms,pulse",
    [
        (1, Pulse(math.pi, K1)),
        (2, Pulse(math.pi, K1)),
        (3, Pulse(math.pi / 2, 0.0, 1.234)),
        (4, Pulse(2.2, -1.7, -0.5)),
    ],
)
def test_full_space_no_leakage(n_atoms, pulse):
    report = full_space_check(n_atoms, pulse)
    assert report.dimension == 3**n_atoms
    assert report.max_leakage < 1e-10
    assert report.max_deviation < 1e-9


def test_full_space_zero_area():
    report = full_space_check(3, Pulse(0.0, 1.0, 0.3))
    assert report.max_leakage == 0
    assert report.max_deviation == 0


def test_full_space_size_guard():
    with pytest.raises(OracleScaleError):
        full_space_check(5, Pulse(math.pi))
