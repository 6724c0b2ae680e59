# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pulse-sequence kernel.

Same contract as ``srmetro._kernels_py.apply_sequence``.
"""

from libc.math cimport cos, sin


def apply_sequence(double complex[:, ::1] amp_b,
                   double complex[:, ::1] amp_a,
                   const double[:, :] x,
                   const double[:, :] areas,
                   const double[:] ks,
                   const double[:, :] phases):
    cdef Py_ssize_t n_rows = amp_b.shape[0]
    cdef Py_ssize_t n_atoms = amp_b.shape[1]
    cdef Py_ssize_t n_pulses = ks.shape[0]
    cdef Py_ssize_t r, p, j
    cdef double c, s, chi, ce, se, br, bi, ar, ai

    if amp_a.shape[0] != n_rows or amp_a.shape[1] != n_atoms:
        raise ValueError("amp_a shape differs from amp_b")
    if x.shape[0] != n_rows or x.shape[1] != n_atoms:
        raise ValueError("x shape differs from amplitudes")
    if areas.shape[0] != n_rows or areas.shape[1] != n_pulses:
        raise ValueError("areas must have shape (rows, pulses)")
    if phases.shape[0] != n_rows or phases.shape[1] != n_pulses:
        raise ValueError("phases must have shape (rows, pulses)")

    # real arithmetic: complex products in C go through NaN-checking helpers
    with nogil:
        for r in range(n_rows):
            for p in range(n_pulses):
                c = cos(0.5 * areas[r, p])
                s = sin(0.5 * areas[r, p])
                for j in range(n_atoms):
                    chi = ks[p] * x[r, j] + phases[r, p]
                    ce = s * cos(chi)
                    se = s * sin(chi)
                    br = amp_b[r, j].real
                    bi = amp_b[r, j].imag
                    ar = amp_a[r, j].real
                    ai = amp_a[r, j].imag
                    # b' = c b + i s e^{i chi} a,  a' = c a + i s e^{-i chi} b
                    amp_b[r, j] = (c * br - ce * ai - se * ar) + 1j * (c * bi + ce * ar - se * ai)
                    amp_a[r, j] = (c * ar - ce * bi + se * br) + 1j * (c * ai + ce * br + se * bi)
