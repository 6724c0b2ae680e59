"""Parameter records for a protocol run and its imperfections."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .ensemble import AtomEnsemble
from .errors import InvalidInputError
from .rng import DEFAULT_SEED, POSITIONS, stream

NOISE_STAGES = ("encode", "decode", "both")


def _check_finite(name, value):
    if not math.isfinite(value):
        raise InvalidInputError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class NoiseParams:
    """Gaussian pulse imperfections.

    ``dS`` is the absolute standard deviation of the pi-pulse area (rad) and
    ``dPhi`` that of the optical phase (rad). ``stages`` picks which pi-pulse
    train is noisy: the 2N encoding pulses (default), the 2N decoding pulses,
    or all 4N. ``half_pulses`` extends the noise to the two pi/2 pulses.
    ``retention`` is the surviving atom fraction eta, applied to the signal.
    """

    dS: float = 0.0
    dPhi: float = 0.0
    retention: float = 1.0
    stages: str = "encode"
    half_pulses: bool = False

    def __post_init__(self):
        for name in ("dS", "dPhi", "retention"):
            _check_finite(name, getattr(self, name))
        if self.dS < 0:
            raise InvalidInputError("dS must be >= 0")
        if self.dPhi < 0:
            raise InvalidInputError("dPhi must be >= 0")
        if not 0 < self.retention <= 1:
            raise InvalidInputError("retention must lie in (0, 1]")
        if self.stages not in NOISE_STAGES:
            raise InvalidInputError(f"stages must be one of {NOISE_STAGES}, got {self.stages!r}")

    @property
    def is_zero(self) -> bool:
        return self.dS == 0 and self.dPhi == 0

    def perturb(self, rng: np.random.Generator, areas: np.ndarray, phases: np.ndarray) -> None:
        """Add independent N(0, dS^2) / N(0, dPhi^2) errors in place.

        Both arrays have shape ``(rows, pulses)``. Area errors are drawn for
        the whole block first, then phase errors; both are always drawn so
        the stream layout does not depend on which deviations are zero.
        """
        areas += rng.normal(0.0, self.dS, size=areas.shape)
        phases += rng.normal(0.0, self.dPhi, size=phases.shape)


@dataclass(frozen=True)
class ThermalParams:
    """Thermal motion: most probable speed ``v_m`` (um/us), duration ``tau`` (us).

    Atoms are frozen during each pulse train and drift freely for
    ``drift_fraction * tau`` between encoding and decoding.
    """

    v_m: float
    tau: float
    drift_fraction: float = 1.0

    def __post_init__(self):
        for name in ("v_m", "tau", "drift_fraction"):
            _check_finite(name, getattr(self, name))
            if getattr(self, name) < 0:
                raise InvalidInputError(f"{name} must be >= 0")

    @property
    def drift_time(self) -> float:
        return self.drift_fraction * self.tau


@dataclass(frozen=True)
class ProtocolConfig:
    """Everything needed to reproduce one experiment.

    ``n_pairs`` is N (the protocol uses 2N pi pulses to encode and 2N to
    decode), ``k1`` the effective wavenumber in rad/um and ``r0`` the
    displacement in um applied between encoding and decoding. Positions are
    drawn uniformly over ``length`` um (default 100 wavelengths) from the
    seed unless given explicitly.
    """

    n_pairs: int
    k1: float
    n_atoms: int = 16
    r0: float = 0.0
    noise: NoiseParams | None = None
    thermal: ThermalParams | None = None
    seed: int = DEFAULT_SEED
    length: float | None = None
    positions: tuple[float, ...] | None = None

    def __post_init__(self):
        if int(self.n_pairs) != self.n_pairs or self.n_pairs < 0:
            raise InvalidInputError("n_pairs must be an integer >= 0")
        object.__setattr__(self, "n_pairs", int(self.n_pairs))
        _check_finite("k1", self.k1)
        if not self.k1 > 0:
            raise InvalidInputError("k1 must be > 0")
        _check_finite("r0", self.r0)
        if self.positions is not None:
            pos = tuple(float(p) for p in self.positions)
            object.__setattr__(self, "positions", pos)
            object.__setattr__(self, "n_atoms", len(pos))
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise InvalidInputError("n_atoms must be an integer >= 1")
        if self.length is not None:
            _check_finite("length", self.length)
            if not self.length > 0:
                raise InvalidInputError("length must be > 0")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise InvalidInputError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def wavelength(self) -> float:
        return 2 * math.pi / self.k1

    def ensemble(self) -> AtomEnsemble:
        if self.positions is not None:
            return AtomEnsemble(self.positions)
        length = self.length if self.length is not None else 100 * self.wavelength
        return AtomEnsemble.uniform(self.n_atoms, length, stream(self.seed, POSITIONS))

    def replace(self, **changes) -> ProtocolConfig:
        return dataclasses.replace(self, **changes)
