import math

import numpy as np
import pytest

from srmetro import AtomEnsemble, ExcitationState, Pulse, apply_pulse, kernels
from srmetro._kernels_py import apply_sequence as py_apply_sequence


def _batch(rng, rows, atoms, pulses):
    b = rng.normal(size=(rows, atoms)) + 1j * rng.normal(size=(rows, atoms))
    a = rng.normal(size=(rows, atoms)) + 1j * rng.normal(size=(rows, atoms))
    x = rng.uniform(-30, 30, size=(rows, atoms))
    areas = rng.uniform(0, 2 * math.pi, size=(rows, pulses))
    ks = rng.uniform(-4, 4, size=pulses)
    phases = rng.uniform(-math.pi, math.pi, size=(rows, pulses))
    return b, a, x, areas, ks, phases


def test_kernel_matches_sequential_apply_pulse(backend, rng):
    b, a, x, areas, ks, phases = _batch(rng, 3, 5, 7)
    expected = []
    for r in range(3):
        s = ExcitationState(b[r], a[r])
        ens = AtomEnsemble(x[r])
        for p in range(7):
            s = apply_pulse(s, ens, Pulse(areas[r, p], ks[p], phases[r, p]))
        expected.append(s)
    kernels.apply_sequence(b, a, x, areas, ks, phases, backend=backend)
    for r in range(3):
        np.testing.assert_allclose(b[r], expected[r].amp_b, atol=1e-13)
        np.testing.assert_allclose(a[r], expected[r].amp_a, atol=1e-13)


def test_backends_agree(rng):
    if len(kernels.available_backends()) < 2:
        pytest.skip("compiled kernel not built")
    b, a, x, areas, ks, phases = _batch(rng, 20, 9, 40)
    b2, a2 = b.copy(), a.copy()
    kernels.apply_sequence(b, a, x, areas, ks, phases, backend="python")
    kernels.apply_sequence(b2, a2, x, areas, ks, phases, backend="cython")
    assert np.max(np.abs(b - b2)) < 1e-12
    assert np.max(np.abs(a - a2)) < 1e-12


def test_broadcast_positions_and_pulses(backend, rng):
    b, a, x, areas, ks, phases = _batch(rng, 4, 3, 5)
    b2, a2 = b.copy(), a.copy()
    shared_x = x[0]
    kernels.apply_sequence(b, a, shared_x, areas[0], ks, phases[0], backend=backend)
    kernels.apply_sequence(
        b2, a2, np.tile(shared_x, (4, 1)), np.tile(areas[0], (4, 1)), ks,
        np.tile(phases[0], (4, 1)), backend=backend,
    )
    np.testing.assert_allclose(b, b2, atol=1e-15)
    np.testing.assert_allclose(a, a2, atol=1e-15)


def test_norm_preserved_per_row(backend, rng):
    b, a, x, areas, ks, phases = _batch(rng, 6, 8, 100)
    before = np.sum(np.abs(b) ** 2 + np.abs(a) ** 2, axis=1)
    kernels.apply_sequence(b, a, x, areas, ks, phases, backend=backend)
    after = np.sum(np.abs(b) ** 2 + np.abs(a) ** 2, axis=1)
    np.testing.assert_allclose(after, before, rtol=100 * 1e-12)


def test_shape_errors(backend):
    b = np.zeros((2, 3), complex)
    a = np.zeros((2, 3), complex)
    with pytest.raises(ValueError):
        kernels.apply_sequence(b, a, np.zeros((2, 3)), np.zeros((2, 4)), np.zeros(3), np.zeros((2, 3)), backend=backend)


def test_python_fallback_direct_shape_checks():
    b = np.zeros((2, 3), complex)
    with pytest.raises(ValueError):
        py_apply_sequence(b, np.zeros((2, 2), complex), np.zeros((2, 3)), np.zeros((2, 1)), np.zeros(1), np.zeros((2, 1)))
