"""Pulse imperfections, thermal motion and the Monte Carlo fringe engine."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import NoiseParams, ProtocolConfig, ThermalParams
from .dynamics import Pulse, PulseSchedule, simulate_batch
from .errors import DegenerateVisibilityError, InvalidInputError, InvalidStateError
from .rng import MC_POINT, stream

__all__ = [
    "NoiseParams",
    "ThermalParams",
    "McResult",
    "perturb_pulse",
    "mc_fringe",
    "mc_thermal_fringe",
    "analytic_noisy_sensitivity",
    "analytic_noisy_visibility",
    "thermal_envelope",
    "thermal_sensitivity",
]


def perturb_pulse(pulse: Pulse, rng: np.random.Generator, params: NoiseParams) -> Pulse:
    """Copy of ``pulse`` with Gaussian area and phase errors; ``k`` is kept."""
    d_area = rng.normal(0.0, params.dS)
    d_phase = rng.normal(0.0, params.dPhi)
    return Pulse(max(pulse.area + d_area, 0.0), pulse.k, pulse.phase + d_phase)


def analytic_noisy_visibility(n_pairs: int, dS: float) -> float:
    return 1.0 - n_pairs * dS**2 / 2


def analytic_noisy_sensitivity(n_pairs: int, dS: float, dPhi: float) -> float:
    """[4N (1 - N dS^2/2)]^-1 + dPhi / sqrt(4N), in units of k1 r0."""
    if n_pairs < 1:
        raise InvalidInputError("n_pairs must be >= 1")
    vis = analytic_noisy_visibility(n_pairs, dS)
    if vis <= 0:
        raise DegenerateVisibilityError(f"N dS^2 / 2 = {1 - vis:g} >= 1: no fringe left")
    return 1.0 / (4 * n_pairs * vis) + dPhi / math.sqrt(4 * n_pairs)


def thermal_envelope(n_pairs: int, k1: float, v_m: float, tau: float) -> float:
    """exp(-2 (N k1 v_m tau)^2)."""
    for name, val in (("n_pairs", n_pairs), ("k1", k1), ("v_m", v_m), ("tau", tau)):
        if val < 0:
            raise InvalidInputError(f"{name} must be >= 0")
    return math.exp(-2.0 * (n_pairs * k1 * v_m * tau) ** 2)


def thermal_sensitivity(n_pairs: int, k1: float, v_m: float, tau: float) -> float:
    """exp(eps^2 N^2) / 4N with eps = sqrt(2) k1 v_m tau."""
    if n_pairs < 1:
        raise InvalidInputError("n_pairs must be >= 1")
    eps = math.sqrt(2.0) * k1 * v_m * tau
    return math.exp((eps * n_pairs) ** 2) / (4 * n_pairs)


@dataclass(frozen=True, eq=False)
class McResult:
    """Trial-averaged signal on a displacement grid.

    ``grid`` holds k1 r0 (rad), ``r0`` the displacements in um.
    """

    grid: np.ndarray
    r0: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    trials: int
    seed: int


def _point_signal(config: ProtocolConfig, x0: np.ndarray, r0: float, index: int, trials: int, backend):
    rng = stream(config.seed, MC_POINT, index)
    n = config.n_pairs
    if config.noise is not None:
        sched = PulseSchedule.noisy(trials, n, config.noise, rng)
    else:
        sched = PulseSchedule.ideal(trials, n)
    x_dec = x0 + r0
    if config.thermal is not None and config.thermal.v_m > 0:
        std = config.thermal.v_m / math.sqrt(2.0)
        v = rng.normal(0.0, std, size=(trials, x0.size))
        x_dec = x_dec + v * config.thermal.drift_time
    p_b, p_a = simulate_batch(x0, x_dec, n, config.k1, sched, backend)
    return p_b - p_a


def _run_mc(config, r0_grid, trials, threads, backend) -> McResult:
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    r0 = np.asarray(r0_grid, dtype=np.float64).reshape(-1)
    if r0.size == 0:
        raise InvalidInputError("grid must not be empty")
    if not np.all(np.isfinite(r0)):
        raise InvalidInputError("grid values must be finite")
    x0 = config.ensemble().positions

    def work(i):
        return _point_signal(config, x0, float(r0[i]), i, trials, backend)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            samples = list(pool.map(work, range(r0.size)))
    else:
        samples = [work(i) for i in range(r0.size)]
    samples = np.stack(samples)  # (points, trials)
    mean = samples.mean(axis=1)
    if trials > 1:
        stderr = samples.std(axis=1, ddof=1) / math.sqrt(trials)
    else:
        stderr = np.zeros(r0.size)
    return McResult(config.k1 * r0, r0, mean, stderr, trials, config.seed)


def mc_fringe(
    config: ProtocolConfig,
    r0_grid,
    trials: int,
    threads: int = 1,
    backend: str | None = None,
) -> McResult:
    """Average the signal over ``trials`` noisy-pulse shots per displacement.

    Each grid point draws from its own stream derived from ``config.seed``,
    so results are identical for any ``threads``.
    """
    if config.noise is None:
        raise InvalidStateError("mc_fringe needs config.noise")
    return _run_mc(config, r0_grid, trials, threads, backend)


def mc_thermal_fringe(
    config: ProtocolConfig,
    r0_grid,
    trials: int,
    threads: int = 1,
    backend: str | None = None,
) -> McResult:
    """Average over thermal velocity draws (and pulse noise, if configured).

    Per trial every atom gets a velocity component of std ``v_m / sqrt(2)``
    and drifts for ``thermal.drift_time`` between the trains.
    """
    if config.thermal is None:
        raise InvalidStateError("mc_thermal_fringe needs config.thermal")
    return _run_mc(config, r0_grid, trials, threads, backend)
