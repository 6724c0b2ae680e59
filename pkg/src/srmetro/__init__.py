"""Simulation and analysis of superradiant Heisenberg-limit displacement metrology.

A single collective excitation is split between two timed Dicke states,
2N pi-pulse pairs push them 4N photon momenta apart, a rigid displacement
r0 imprints a relative phase 4 N k1 r0, and the reversed pulse train plus a
pi/2 pulse turn that phase into the signal P = -cos(4 N k1 r0).
"""

from .analysis import (
    FitResult,
    FringeScan,
    SensitivityReport,
    apply_retention,
    default_r0_grid,
    fit_cosine,
    scan_fringe,
    sensitivity_from_fit,
)
from .config import NoiseParams, ProtocolConfig, ThermalParams
from .dynamics import (
    Pulse,
    Readout,
    apply_pi_half_ba,
    apply_pulse,
    decode_sequence,
    encode_sequence,
    ideal_signal,
    run_protocol,
)
from .ensemble import (
    AtomEnsemble,
    ExcitationState,
    displace,
    drift,
    fidelity,
    make_timed_dicke,
    overlap,
    sample_thermal_velocities,
)
from .errors import (
    DegenerateVisibilityError,
    FitDegeneracyError,
    InvalidInputError,
    InvalidStateError,
    MetrologyError,
    NoFringeError,
    OracleScaleError,
)
from .kernels import BACKEND
from .noise import (
    McResult,
    analytic_noisy_sensitivity,
    mc_fringe,
    mc_thermal_fringe,
    perturb_pulse,
    thermal_envelope,
    thermal_sensitivity,
)

__version__ = "0.1.0"
