"""Pulse unitaries and the encode / displace / decode / read-out protocol.

A pulse with area ``S``, signed wavenumber ``k`` and phase ``phi`` acts on
atom ``j`` as a rotation by ``S/2`` in span{|b_j>, |a_j>}:

    b_j -> cos(S/2) b_j + i sin(S/2) e^{+i chi_j} a_j
    a_j -> cos(S/2) a_j + i sin(S/2) e^{-i chi_j} b_j,    chi_j = k x_j + phi

so an ideal pi pulse with ``k = +k1`` maps |b_q> to i|a_{q-k1}> and |a_q> to
i|b_{q+k1}>. Encoding applies (U1, U2) N times; decoding applies (U2, U1)
N times, which undoes it exactly when nothing moved in between.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from . import kernels
from .config import NoiseParams, ProtocolConfig
from .ensemble import (
    AtomEnsemble,
    ExcitationState,
    make_timed_dicke,
    sample_thermal_velocities,
)
from .errors import InvalidInputError
from .rng import SINGLE_RUN, stream


@dataclass(frozen=True)
class Pulse:
    """Instantaneous pulse: area (rad), signed wavenumber (rad/um), phase (rad)."""

    area: float
    k: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        for name in ("area", "k", "phase"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidInputError(f"pulse {name} must be finite")
        if self.area < 0:
            raise InvalidInputError("pulse area must be >= 0")


@dataclass(frozen=True)
class Readout:
    """Populations of |b_0> and |a_0> after the final pi/2 pulse."""

    P_b: float
    P_a: float

    @property
    def P(self) -> float:
        return self.P_b - self.P_a


PI_HALF_BA = Pulse(math.pi / 2)


def apply_pulse(state: ExcitationState, ensemble: AtomEnsemble, pulse: Pulse) -> ExcitationState:
    if state.n_atoms != ensemble.n_atoms:
        raise InvalidInputError(
            f"state has {state.n_atoms} atoms, ensemble has {ensemble.n_atoms}"
        )
    c = math.cos(pulse.area / 2)
    s = math.sin(pulse.area / 2)
    e = np.exp(1j * (pulse.k * ensemble.positions + pulse.phase))
    b, a = state.amp_b, state.amp_a
    return ExcitationState(c * b + 1j * s * e * a, c * a + 1j * s * e.conj() * b)


def apply_pi_half_ba(state: ExcitationState) -> ExcitationState:
    """Wavevector-free pi/2 pulse on every atom: |b_0> -> (|b_0> + i|a_0>)/sqrt(2)."""
    r = 1 / math.sqrt(2)
    b, a = state.amp_b, state.amp_a
    return ExcitationState(r * (b + 1j * a), r * (a + 1j * b))


def ideal_encode_pulses(n_pairs: int, k1: float) -> list[Pulse]:
    """U1 (+k1) then U2 (-k1), repeated ``n_pairs`` times."""
    return [Pulse(math.pi, k1), Pulse(math.pi, -k1)] * n_pairs


def ideal_decode_pulses(n_pairs: int, k1: float) -> list[Pulse]:
    """U2 (-k1) then U1 (+k1), repeated ``n_pairs`` times."""
    return [Pulse(math.pi, -k1), Pulse(math.pi, k1)] * n_pairs


def _run_pulses(state, ensemble, pulses: Iterable[Pulse], expected: int):
    pulses = list(pulses)
    if len(pulses) != expected:
        raise InvalidInputError(f"expected {expected} pulses, got {len(pulses)}")
    for pulse in pulses:
        state = apply_pulse(state, ensemble, pulse)
    return state


def encode_sequence(
    state: ExcitationState,
    ensemble: AtomEnsemble,
    n_pairs: int,
    k1: float,
    pulses: Iterable[Pulse] | None = None,
) -> ExcitationState:
    """Write 2N photon momenta: ideally (|b_0>+i|a_0>)/sqrt(2) -> |KAT(N)>.

    ``pulses`` replaces the ideal train (e.g. with perturbed copies); it
    must contain exactly 2N pulses.
    """
    if pulses is None:
        pulses = ideal_encode_pulses(n_pairs, k1)
    return _run_pulses(state, ensemble, pulses, 2 * n_pairs)


def decode_sequence(
    state: ExcitationState,
    ensemble: AtomEnsemble,
    n_pairs: int,
    k1: float,
    pulses: Iterable[Pulse] | None = None,
) -> ExcitationState:
    if pulses is None:
        pulses = ideal_decode_pulses(n_pairs, k1)
    return _run_pulses(state, ensemble, pulses, 2 * n_pairs)


def ideal_signal(n_pairs: int, k1: float, r0: float) -> float:
    return -math.cos(4 * n_pairs * k1 * r0)


# --- batched executor -------------------------------------------------------


@dataclass
class PulseSchedule:
    """Per-row pulse parameters for a batch of protocol runs.

    The encode train is [pi/2, U1, U2, ...] and the decode train
    [U2, U1, ..., pi/2]; each holds 2N + 1 pulses.
    """

    enc_areas: np.ndarray
    enc_phases: np.ndarray
    dec_areas: np.ndarray
    dec_phases: np.ndarray

    @classmethod
    def ideal(cls, rows: int, n_pairs: int) -> PulseSchedule:
        m = 2 * n_pairs + 1
        enc = np.full((rows, m), math.pi)
        dec = np.full((rows, m), math.pi)
        enc[:, 0] = math.pi / 2
        dec[:, -1] = math.pi / 2
        return cls(enc, np.zeros((rows, m)), dec, np.zeros((rows, m)))

    @classmethod
    def noisy(cls, rows: int, n_pairs: int, noise: NoiseParams, rng: np.random.Generator) -> PulseSchedule:
        """Ideal schedule with Gaussian errors on the stages ``noise`` selects.

        Draw order is fixed: encode block, then decode block, each over all
        2N + 1 slots; pi/2 slots are reset afterwards unless
        ``noise.half_pulses`` is set.
        """
        sched = cls.ideal(rows, n_pairs)
        ideal = cls.ideal(rows, n_pairs)
        noise.perturb(rng, sched.enc_areas, sched.enc_phases)
        noise.perturb(rng, sched.dec_areas, sched.dec_phases)
        if noise.stages == "decode":
            sched.enc_areas[:, 1:] = ideal.enc_areas[:, 1:]
            sched.enc_phases[:, 1:] = 0.0
        if noise.stages == "encode":
            sched.dec_areas[:, :-1] = ideal.dec_areas[:, :-1]
            sched.dec_phases[:, :-1] = 0.0
        if not noise.half_pulses:
            sched.enc_areas[:, 0] = math.pi / 2
            sched.enc_phases[:, 0] = 0.0
            sched.dec_areas[:, -1] = math.pi / 2
            sched.dec_phases[:, -1] = 0.0
        return sched


def encode_wavenumbers(n_pairs: int, k1: float) -> np.ndarray:
    return np.concatenate([[0.0], np.tile([k1, -k1], n_pairs)])


def decode_wavenumbers(n_pairs: int, k1: float) -> np.ndarray:
    return np.concatenate([np.tile([-k1, k1], n_pairs), [0.0]])


def simulate_batch(
    x_encode: np.ndarray,
    x_decode: np.ndarray,
    n_pairs: int,
    k1: float,
    schedule: PulseSchedule,
    backend: str | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Run the full protocol for every row of ``schedule``.

    ``x_encode`` / ``x_decode`` are atom positions (um) during the encode and
    decode trains; either may be 1-D (shared) or ``(rows, atoms)``. Returns
    ``(P_b, P_a)`` arrays of length ``rows``, projecting on |b_0>, |a_0>.
    """
    rows = schedule.enc_areas.shape[0]
    n_atoms = np.shape(x_encode)[-1]
    amp_b = np.full((rows, n_atoms), 1 / math.sqrt(n_atoms), dtype=np.complex128)
    amp_a = np.zeros((rows, n_atoms), dtype=np.complex128)
    kernels.apply_sequence(
        amp_b, amp_a, x_encode, schedule.enc_areas,
        encode_wavenumbers(n_pairs, k1), schedule.enc_phases, backend=backend,
    )
    kernels.apply_sequence(
        amp_b, amp_a, x_decode, schedule.dec_areas,
        decode_wavenumbers(n_pairs, k1), schedule.dec_phases, backend=backend,
    )
    p_b = np.abs(amp_b.sum(axis=1)) ** 2 / n_atoms
    p_a = np.abs(amp_a.sum(axis=1)) ** 2 / n_atoms
    return p_b, p_a


def run_protocol(config: ProtocolConfig, backend: str | None = None) -> Readout:
    """One shot of prepare, pi/2, encode, move, decode, pi/2, project.

    Pulse noise and thermal velocities, when configured, are drawn from the
    config's seed; the ideal run is deterministic and gives
    ``P = -cos(4 N k1 r0)``.
    """
    ens = config.ensemble()
    rng = stream(config.seed, SINGLE_RUN)
    if config.noise is not None:
        sched = PulseSchedule.noisy(1, config.n_pairs, config.noise, rng)
    else:
        sched = PulseSchedule.ideal(1, config.n_pairs)
    x_dec = ens.positions + config.r0
    if config.thermal is not None:
        v = sample_thermal_velocities(rng, config.thermal.v_m, ens.n_atoms)
        x_dec = x_dec + v * config.thermal.drift_time
    p_b, p_a = simulate_batch(ens.positions, x_dec, config.n_pairs, config.k1, sched, backend)
    return Readout(float(p_b[0]), float(p_a[0]))


def prepare_superposition(ensemble: AtomEnsemble) -> ExcitationState:
    """(|b_0> + i|a_0>)/sqrt(2), the state entering the encode train."""
    return apply_pi_half_ba(make_timed_dicke(ensemble, "b", 0.0))
