"""Brute-force references for the closed-form pulse action.

Two independent checks live here: the exponential of the dense
``2 N_a x 2 N_a`` generator on the single-excitation subspace, and the
exponential of the full ``3**N_a`` dimensional generator (levels c, b, a per
atom), which shows that a pulse never moves amplitude out of the
single-excitation manifold. Both are capped at small sizes on purpose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .dynamics import Pulse, apply_pulse
from .ensemble import AtomEnsemble, ExcitationState, make_timed_dicke
from .errors import InvalidInputError, OracleScaleError

MAX_DENSE_ATOMS = 64
MAX_FULL_SPACE_ATOMS = 4


@dataclass(frozen=True, eq=False)
class DenseGenerator:
    """Hermitian G with U = exp(iG); basis order [b_0..b_{n-1}, a_0..a_{n-1}]."""

    matrix: np.ndarray

    @property
    def n_atoms(self) -> int:
        return self.matrix.shape[0] // 2

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))


def generator_matrix(ensemble: AtomEnsemble, pulse: Pulse) -> DenseGenerator:
    n = ensemble.n_atoms
    if n > MAX_DENSE_ATOMS:
        raise OracleScaleError(f"oracle scale exceeded: {n} atoms > {MAX_DENSE_ATOMS}")
    g = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    coupling = 0.5 * pulse.area * np.exp(1j * (pulse.k * ensemble.positions + pulse.phase))
    idx = np.arange(n)
    g[idx, n + idx] = coupling  # sigma_j^+ = |b_j><a_j|
    g[n + idx, idx] = coupling.conj()
    return DenseGenerator(g)


def expm(a: np.ndarray, rtol: float = 1e-16) -> np.ndarray:
    """Matrix exponential by scaling and squaring of a truncated Taylor series.

    The argument is scaled by 2**-s until its 1-norm is at most 1/2; the
    series stops once a term's 1-norm falls below ``rtol`` times the partial
    sum's.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError("expm needs a square matrix")
    norm = np.linalg.norm(a, 1)
    squarings = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0 else 0
    scaled = a / 2.0**squarings
    total = np.eye(a.shape[0], dtype=np.complex128)
    term = total.copy()
    for n in range(1, 100):
        term = term @ scaled / n
        total += term
        if np.linalg.norm(term, 1) < rtol * np.linalg.norm(total, 1):
            break
    for _ in range(squarings):
        total = total @ total
    return total


def expm_apply(gen: DenseGenerator, state: ExcitationState) -> ExcitationState:
    """exp(iG) applied to ``state``."""
    if state.n_atoms != gen.n_atoms:
        raise InvalidInputError(
            f"generator is for {gen.n_atoms} atoms, state has {state.n_atoms}"
        )
    return ExcitationState.from_vector(expm(1j * gen.matrix) @ state.to_vector())


@dataclass(frozen=True)
class FullSpaceReport:
    n_atoms: int
    dimension: int
    max_leakage: float
    max_deviation: float


_C, _B, _A = 0, 1, 2


def _single_atom_op(n_atoms: int, j: int, op: np.ndarray) -> np.ndarray:
    eye = np.eye(3)
    return reduce(np.kron, [op if i == j else eye for i in range(n_atoms)])


def full_space_check(
    n_atoms: int,
    pulse: Pulse,
    positions=None,
    dicke_k: float = 0.0,
) -> FullSpaceReport:
    """Exponentiate the pulse generator on the full (c, b, a)^N_a space.

    The embedded timed Dicke state |b_{dicke_k}> is evolved; the report gives
    the largest amplitude on basis states whose excitation number is not one,
    and the largest deviation of the in-manifold amplitudes from
    :func:`apply_pulse`.
    """
    if n_atoms > MAX_FULL_SPACE_ATOMS:
        raise OracleScaleError(
            f"oracle scale exceeded: full space needs n_atoms <= {MAX_FULL_SPACE_ATOMS}"
        )
    if n_atoms < 1:
        raise InvalidInputError("n_atoms must be >= 1")
    if positions is None:
        positions = 1.37 * np.arange(n_atoms)  # spacing incommensurate with pi
    ens = AtomEnsemble(positions)
    if ens.n_atoms != n_atoms:
        raise InvalidInputError("positions length must equal n_atoms")

    raise_ba = np.zeros((3, 3))
    raise_ba[_B, _A] = 1.0
    dim = 3**n_atoms
    g = np.zeros((dim, dim), dtype=np.complex128)
    chi = pulse.k * ens.positions + pulse.phase
    for j in range(n_atoms):
        sp = _single_atom_op(n_atoms, j, raise_ba)
        g += 0.5 * pulse.area * (np.exp(1j * chi[j]) * sp + np.exp(-1j * chi[j]) * sp.T)
    unitary = expm(1j * g)

    # index of "atom j in level lvl, all others in c"
    def index(j, lvl):
        return lvl * 3 ** (n_atoms - 1 - j)

    start = make_timed_dicke(ens, "b", dicke_k)
    psi = np.zeros(dim, dtype=np.complex128)
    for j in range(n_atoms):
        psi[index(j, _B)] = start.amp_b[j]
    out = unitary @ psi

    in_manifold = np.zeros(dim, dtype=bool)
    for j in range(n_atoms):
        in_manifold[index(j, _B)] = True
        in_manifold[index(j, _A)] = True
    leak = float(np.max(np.abs(out[~in_manifold]), initial=0.0))

    expected = apply_pulse(start, ens, pulse)
    got_b = np.array([out[index(j, _B)] for j in range(n_atoms)])
    got_a = np.array([out[index(j, _A)] for j in range(n_atoms)])
    dev = float(max(np.max(np.abs(got_b - expected.amp_b)), np.max(np.abs(got_a - expected.amp_a))))
    return FullSpaceReport(n_atoms, dim, leak, dev)
