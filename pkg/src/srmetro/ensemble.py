"""Atomic ensembles and single-excitation collective states.

Units used throughout the package: lengths in um, wavenumbers in rad/um,
times in us and velocities in um/us.

A single-excitation state of ``N_a`` three-level atoms is stored as two
complex vectors: ``amp_b[j]`` is the amplitude of the configuration with atom
``j`` in ``|b>`` and all others in ``|c>``; ``amp_a[j]`` the same for ``|a>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import InvalidInputError, InvalidStateError

Level = Literal["a", "b"]


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class AtomEnsemble:
    """Positions (um) and optional velocities (um/us) of a 1-D ensemble."""

    positions: np.ndarray
    velocities: np.ndarray | None = None

    def __post_init__(self):
        pos = _frozen(self.positions, np.float64)
        if pos.size == 0:
            raise InvalidInputError("ensemble needs at least one atom")
        if not np.all(np.isfinite(pos)):
            raise InvalidInputError("positions must be finite")
        object.__setattr__(self, "positions", pos)
        if self.velocities is not None:
            vel = _frozen(self.velocities, np.float64)
            if vel.shape != pos.shape:
                raise InvalidInputError(
                    f"velocities has {vel.size} entries, positions has {pos.size}"
                )
            if not np.all(np.isfinite(vel)):
                raise InvalidInputError("velocities must be finite")
            object.__setattr__(self, "velocities", vel)

    @property
    def n_atoms(self) -> int:
        return self.positions.size

    @classmethod
    def uniform(cls, n_atoms: int, length: float, rng: np.random.Generator) -> AtomEnsemble:
        """Draw ``n_atoms`` positions uniformly on ``[0, length)``."""
        if n_atoms < 1:
            raise InvalidInputError("n_atoms must be >= 1")
        if not length > 0:
            raise InvalidInputError("length must be positive")
        return cls(rng.uniform(0.0, length, size=n_atoms))

    def with_velocities(self, velocities) -> AtomEnsemble:
        return AtomEnsemble(self.positions, velocities)


@dataclass(frozen=True, eq=False)
class ExcitationState:
    """Amplitudes over (atom, level) in the single-excitation manifold."""

    amp_b: np.ndarray
    amp_a: np.ndarray

    def __post_init__(self):
        b = _frozen(self.amp_b, np.complex128)
        a = _frozen(self.amp_a, np.complex128)
        if b.shape != a.shape:
            raise InvalidInputError("amp_b and amp_a must have equal length")
        object.__setattr__(self, "amp_b", b)
        object.__setattr__(self, "amp_a", a)

    @property
    def n_atoms(self) -> int:
        return self.amp_b.size

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amp_b) ** 2 + np.abs(self.amp_a) ** 2)))

    def to_vector(self) -> np.ndarray:
        """Stack as ``[amp_b, amp_a]``, the layout the dense oracle uses."""
        return np.concatenate([self.amp_b, self.amp_a])

    @classmethod
    def from_vector(cls, vec) -> ExcitationState:
        vec = np.asarray(vec, dtype=np.complex128)
        if vec.ndim != 1 or vec.size % 2:
            raise InvalidInputError("state vector must be 1-D with even length")
        n = vec.size // 2
        return cls(vec[:n], vec[n:])

    def scaled(self, factor: complex) -> ExcitationState:
        return ExcitationState(self.amp_b * factor, self.amp_a * factor)

    def __add__(self, other: ExcitationState) -> ExcitationState:
        _check_sizes(self, other)
        return ExcitationState(self.amp_b + other.amp_b, self.amp_a + other.amp_a)


def _check_sizes(s1: ExcitationState, s2: ExcitationState) -> None:
    if s1.n_atoms != s2.n_atoms:
        raise InvalidInputError(f"state sizes differ: {s1.n_atoms} vs {s2.n_atoms}")


def make_timed_dicke(ensemble: AtomEnsemble, level: Level, k: float) -> ExcitationState:
    """Timed Dicke state: amplitude ``exp(i k x_j) / sqrt(N_a)`` on ``level``."""
    if level not in ("a", "b"):
        raise InvalidInputError(f"level must be 'a' or 'b', got {level!r}")
    n = ensemble.n_atoms
    amps = np.exp(1j * k * ensemble.positions) / np.sqrt(n)
    zeros = np.zeros(n, dtype=np.complex128)
    if level == "b":
        return ExcitationState(amps, zeros)
    return ExcitationState(zeros, amps)


def overlap(s1: ExcitationState, s2: ExcitationState) -> complex:
    """Inner product <s1|s2> (antilinear in ``s1``)."""
    _check_sizes(s1, s2)
    return complex(np.vdot(s1.amp_b, s2.amp_b) + np.vdot(s1.amp_a, s2.amp_a))


def fidelity(s1: ExcitationState, s2: ExcitationState) -> float:
    """``|<s1|s2>|^2``; insensitive to global phase."""
    return abs(overlap(s1, s2)) ** 2


def displace(ensemble: AtomEnsemble, d: float) -> AtomEnsemble:
    """Rigidly shift every atom by ``d`` um."""
    return AtomEnsemble(ensemble.positions + d, ensemble.velocities)


def drift(ensemble: AtomEnsemble, t: float) -> AtomEnsemble:
    """Free flight for ``t`` us: ``x_j -> x_j + v_j t``."""
    if ensemble.velocities is None:
        raise InvalidStateError("drift needs an ensemble with velocities")
    return AtomEnsemble(ensemble.positions + ensemble.velocities * t, ensemble.velocities)


def sample_thermal_velocities(rng: np.random.Generator, v_m: float, n_atoms: int) -> np.ndarray:
    """1-D Maxwell-Boltzmann velocity components.

    ``v_m`` is the most probable 3-D speed sqrt(2 kT / m), so each Cartesian
    component is normal with standard deviation ``v_m / sqrt(2)``.
    """
    if v_m < 0:
        raise InvalidInputError("v_m must be >= 0")
    if n_atoms < 1:
        raise InvalidInputError("n_atoms must be >= 1")
    if v_m == 0:
        return np.zeros(n_atoms)
    return rng.normal(0.0, v_m / np.sqrt(2.0), size=n_atoms)
