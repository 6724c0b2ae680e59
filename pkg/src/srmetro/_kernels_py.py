"""Pure-numpy fallback for the compiled pulse-sequence kernel."""

import numpy as np


def apply_sequence(amp_b, amp_a, x, areas, ks, phases):
    """Apply a pulse train to a batch of single-excitation states, in place.

    Row ``r`` holds one independent state; ``x[r]`` are its atom positions,
    ``areas[r, p]`` / ``phases[r, p]`` the parameters of pulse ``p`` and
    ``ks[p]`` its signed wavenumber, shared by all rows. Each pulse rotates
    every atom's ``(b, a)`` pair by half its area about an axis set by
    ``chi = k x + phase``.
    """
    n_rows, n_atoms = amp_b.shape
    n_pulses = len(ks)
    if amp_a.shape != amp_b.shape:
        raise ValueError("amp_a shape differs from amp_b")
    if np.shape(x) != (n_rows, n_atoms):
        raise ValueError("x shape differs from amplitudes")
    if np.shape(areas) != (n_rows, n_pulses):
        raise ValueError("areas must have shape (rows, pulses)")
    if np.shape(phases) != (n_rows, n_pulses):
        raise ValueError("phases must have shape (rows, pulses)")

    b = amp_b
    a = amp_a
    for p in range(n_pulses):
        c = np.cos(0.5 * areas[:, p])[:, None]
        s = np.sin(0.5 * areas[:, p])[:, None]
        e = np.exp(1j * (ks[p] * x + phases[:, p][:, None]))
        b, a = c * b + 1j * s * (e * a), c * a + 1j * s * (e.conj() * b)
    amp_b[...] = b
    amp_a[...] = a
