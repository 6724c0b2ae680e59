"""Fringe scans, cosine fits and sensitivity figures.

The fitted model is ``P = -V cos(f * k1r0 + theta)``: ``f`` is expected to
be 4N (the fringe period in r0 is lambda1 / 4N) and ``V`` is the visibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .config import ProtocolConfig
from .dynamics import PulseSchedule, simulate_batch
from .errors import FitDegeneracyError, InvalidInputError, NoFringeError
from .noise import mc_fringe, mc_thermal_fringe

SOURCES = ("ideal", "mc", "mc_thermal")


@dataclass(frozen=True, eq=False)
class FringeScan:
    grid: np.ndarray  # k1 r0, rad
    P: np.ndarray
    source: str = "ideal"
    stderr: np.ndarray | None = None

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=np.float64).reshape(-1)
        p = np.asarray(self.P, dtype=np.float64).reshape(-1)
        if grid.shape != p.shape:
            raise InvalidInputError("grid and P lengths differ")
        if grid.size == 0:
            raise InvalidInputError("scan is empty")
        if np.any(np.diff(grid) <= 0):
            raise InvalidInputError("grid must be strictly increasing")
        if self.source not in SOURCES:
            raise InvalidInputError(f"unknown source {self.source!r}")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "P", p)
        if self.stderr is not None:
            se = np.asarray(self.stderr, dtype=np.float64).reshape(-1)
            if se.shape != p.shape:
                raise InvalidInputError("stderr length differs from P")
            object.__setattr__(self, "stderr", se)


@dataclass(frozen=True)
class FitResult:
    visibility: float
    frequency: float
    phase: float
    residual_rms: float
    visibility_err: float = 0.0
    frequency_err: float = 0.0
    phase_err: float = 0.0


@dataclass(frozen=True)
class SensitivityReport:
    """Phase sensitivities in units of k1 r0 (rad), single shot."""

    delta: float
    heisenberg: float
    shot_noise: float
    ratio_to_heisenberg: float
    ratio_to_shot_noise: float
    delta_err: float = 0.0


def default_r0_grid(n_pairs: int, k1: float, periods: float = 1.5, points_per_period: int = 60) -> np.ndarray:
    """Displacements covering ``periods`` fringes of period lambda1 / 4N."""
    if n_pairs < 1:
        raise InvalidInputError("a fringe needs n_pairs >= 1")
    period = 2 * math.pi / (4 * n_pairs * k1)
    count = int(round(periods * points_per_period))
    return np.arange(count) * (period / points_per_period)


def scan_fringe(
    config: ProtocolConfig,
    r0_grid,
    source: str | None = None,
    trials: int = 1,
    threads: int = 1,
    backend: str | None = None,
) -> FringeScan:
    """Signal over a displacement grid.

    ``source`` defaults to ``"mc_thermal"`` when the config has thermal
    motion, ``"mc"`` when it has pulse noise and ``"ideal"`` otherwise. The
    retention factor of ``config.noise`` scales the result.
    """
    r0 = np.asarray(r0_grid, dtype=np.float64).reshape(-1)
    if r0.size == 0:
        raise InvalidInputError("grid must not be empty")
    if np.any(np.diff(r0) <= 0):
        raise InvalidInputError("grid must be strictly increasing")
    if source is None:
        if config.thermal is not None:
            source = "mc_thermal"
        elif config.noise is not None:
            source = "mc"
        else:
            source = "ideal"

    if source == "ideal":
        x0 = config.ensemble().positions
        sched = PulseSchedule.ideal(r0.size, config.n_pairs)
        p_b, p_a = simulate_batch(x0, x0 + r0[:, None], config.n_pairs, config.k1, sched, backend)
        scan = FringeScan(config.k1 * r0, p_b - p_a, "ideal")
    elif source in ("mc", "mc_thermal"):
        run = mc_fringe if source == "mc" else mc_thermal_fringe
        res = run(config, r0, trials, threads=threads, backend=backend)
        scan = FringeScan(res.grid, res.mean, source, res.stderr)
    else:
        raise InvalidInputError(f"unknown source {source!r}")

    if config.noise is not None and config.noise.retention != 1.0:
        scan = apply_retention(scan, config.noise.retention)
    return scan


def apply_retention(scan: FringeScan, eta: float) -> FringeScan:
    """Scale the signal by the surviving atom fraction ``eta``."""
    if not 0 < eta <= 1:
        raise InvalidInputError("eta must lie in (0, 1]")
    se = None if scan.stderr is None else scan.stderr * eta
    return replace(scan, P=scan.P * eta, stderr=se)


def _weights(scan: FringeScan) -> np.ndarray | None:
    if scan.stderr is None or not np.all(scan.stderr > 0):
        return None
    return 1.0 / scan.stderr**2


def _linear_fit(x, y, w, f):
    """Best (A, B) for y ~ A cos(fx) + B sin(fx); returns (A, B, weighted RSS)."""
    design = np.column_stack([np.cos(f * x), np.sin(f * x)])
    sw = np.ones_like(x) if w is None else np.sqrt(w)
    coef, *_ = np.linalg.lstsq(design * sw[:, None], y * sw, rcond=None)
    resid = (y - design @ coef) * sw
    return coef[0], coef[1], float(resid @ resid)


def _model(params, x):
    v, f, th = params
    return -v * np.cos(f * x + th)


def _jacobian(params, x):
    v, f, th = params
    u = f * x + th
    return np.column_stack([-np.cos(u), v * x * np.sin(u), v * np.sin(u)])


def fit_cosine(scan: FringeScan, f_hint: float) -> FitResult:
    """Least-squares fit of ``-V cos(f x + theta)``.

    For fixed ``f`` the model is linear in its two quadratures; ``f`` is
    searched within +-10 % of ``f_hint`` and the three parameters are then
    polished with Gauss-Newton steps. Per-point standard errors, when all
    positive, weight the fit and set the parameter uncertainties; otherwise
    the uncertainties are scaled by the residual variance.
    """
    x, y = scan.grid, scan.P
    if not f_hint > 0:
        raise InvalidInputError("f_hint must be > 0")
    if x.size < 5:
        raise FitDegeneracyError(f"need >= 5 points, got {x.size}")
    if (x[-1] - x[0]) * f_hint < math.pi:
        raise FitDegeneracyError("scan spans less than half a period of f_hint")
    w = _weights(scan)

    res = minimize_scalar(
        lambda f: _linear_fit(x, y, w, f)[2],
        bounds=(0.9 * f_hint, 1.1 * f_hint),
        method="bounded",
        options={"xatol": 1e-10 * f_hint},
    )
    f = float(res.x)
    a, b, rss = _linear_fit(x, y, w, f)
    # -V cos(fx + th) = -V cos(th) cos(fx) + V sin(th) sin(fx)
    params = np.array([math.hypot(a, b), f, math.atan2(b, -a)])

    sw = np.ones_like(x) if w is None else np.sqrt(w)
    for _ in range(30):
        r = (y - _model(params, x)) * sw
        jac = _jacobian(params, x) * sw[:, None]
        step, *_ = np.linalg.lstsq(jac, r, rcond=None)
        trial = params + step
        r_new = (y - _model(trial, x)) * sw
        if r_new @ r_new > r @ r:
            break
        params = trial
        if np.max(np.abs(step) / np.maximum(np.abs(params), 1.0)) < 1e-15:
            break
    v, f, th = params
    if v < 0:
        v, th = -v, th + math.pi
    th = math.pi - (math.pi - th) % (2 * math.pi)  # wrap into (-pi, pi]

    params = np.array([v, f, th])
    resid = y - _model(params, x)
    jac = _jacobian(params, x) * sw[:, None]
    try:
        cov = np.linalg.inv(jac.T @ jac)
    except np.linalg.LinAlgError:
        cov = np.full((3, 3), np.nan)
    if w is None:
        dof = max(x.size - 3, 1)
        cov = cov * float(resid @ resid) / dof
    errs = np.sqrt(np.abs(np.diag(cov)))
    return FitResult(
        visibility=float(v),
        frequency=float(f),
        phase=float(th),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        visibility_err=float(errs[0]),
        frequency_err=float(errs[1]),
        phase_err=float(errs[2]),
    )


def sensitivity_from_fit(fit: FitResult, n_pairs: int) -> SensitivityReport:
    """Single-shot sensitivity at the steepest point of the fitted fringe.

    There P = 0, the projection noise sqrt(1 - P^2) is 1 and the slope is
    f V, so delta = 1 / (f V).
    """
    if n_pairs < 1:
        raise InvalidInputError("n_pairs must be >= 1")
    if fit.visibility <= 0 or fit.frequency <= 0:
        raise NoFringeError("fitted visibility is zero: no slope")
    delta = 1.0 / (fit.frequency * fit.visibility)
    rel = math.hypot(fit.visibility_err / fit.visibility, fit.frequency_err / fit.frequency)
    heis = 1.0 / (4 * n_pairs)
    shot = 1.0 / math.sqrt(4 * n_pairs)
    return SensitivityReport(delta, heis, shot, delta / heis, delta / shot, delta * rel)
