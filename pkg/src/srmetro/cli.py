"""Command-line front end.

Usage::

    srmetro presets
    srmetro run --preset rb
    srmetro run --n-pairs 16 --out report.json
    srmetro scan --preset noisy-pulses --trials 500 --csv fringe.csv --out scan.json
    srmetro sweep --n-pairs 1,2,4,8,16,32 --csv sweep.csv
    srmetro oracle-check --n-atoms 3

Scenario files are JSON with the sections ``ensemble``, ``protocol``,
``noise``, ``thermal``, ``scan`` and ``mc`` (see ``srmetro presets``).
Values resolve as command-line flag > ``--config`` file > ``--preset`` >
built-in defaults. A JSON report written with ``--out`` can be passed back
as ``--config`` to reproduce it.

Exit codes: 0 success, 1 runtime or tolerance failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .analysis import (
    default_r0_grid,
    fit_cosine,
    scan_fringe,
    sensitivity_from_fit,
)
from .config import NOISE_STAGES, NoiseParams, ProtocolConfig, ThermalParams
from .dynamics import Pulse, apply_pulse, ideal_signal, run_protocol
from .ensemble import AtomEnsemble, ExcitationState
from .errors import InvalidInputError, MetrologyError, OracleScaleError
from .kernels import BACKEND
from .noise import thermal_envelope
from .oracle import MAX_FULL_SPACE_ATOMS, expm_apply, full_space_check, generator_matrix
from .rng import DEFAULT_SEED, stream

EXIT_OK, EXIT_FAILURE, EXIT_INVALID = 0, 1, 2

ORACLE_TOL = 1e-9
LEAKAGE_TOL = 1e-10


class ScenarioError(InvalidInputError):
    """A scenario key is unknown, mistyped or out of range."""


# --- scenario schema ----------------------------------------------------------

# section -> key -> (type, nullable)
SCHEMA = {
    "ensemble": {
        "n_atoms": (int, False),
        "length_um": (float, True),
        "positions": (list, True),
        "seed": (int, False),
    },
    "protocol": {
        "n_pairs": (int, False),
        "k1_rad_per_um": (float, False),
        "r0_um": (float, False),
    },
    "noise": {
        "dS_rad": (float, False),
        "dPhi_rad": (float, False),
        "retention": (float, False),
        "stages": (str, False),
        "half_pulses": (bool, False),
    },
    "thermal": {
        "vm_um_per_us": (float, False),
        "tau_us": (float, False),
        "drift_fraction": (float, False),
    },
    "scan": {
        "r0_min": (float, False),
        "r0_max": (float, False),
        "points": (int, False),
    },
    "mc": {"trials": (int, False)},
}

# sections that may be null (feature switched off)
OPTIONAL_SECTIONS = ("noise", "thermal", "scan")

NOISE_DEFAULTS = {"dS_rad": 0.0, "dPhi_rad": 0.0, "retention": 1.0, "stages": "encode", "half_pulses": False}
THERMAL_DEFAULTS = {"vm_um_per_us": 0.0, "tau_us": 0.0, "drift_fraction": 1.0}

BASE_SCENARIO = {
    "ensemble": {"n_atoms": 16, "length_um": None, "positions": None, "seed": DEFAULT_SEED},
    "protocol": {"n_pairs": 1, "k1_rad_per_um": 2 * math.pi, "r0_um": 0.0},
    "noise": None,
    "thermal": None,
    "scan": None,
    "mc": {"trials": 500},
}

PRESETS = {
    "rb": {
        "description": "ultracold 87Rb, copropagating Raman pulses: lambda1 = 200 um, "
        "N = 10, v_m = 1 cm/s, tau = 100 us, 10 um optical-force displacement",
        "scenario": {
            "ensemble": {"n_atoms": 64},
            "protocol": {"n_pairs": 10, "k1_rad_per_um": 2 * math.pi / 200.0, "r0_um": 10.0},
            "thermal": {"vm_um_per_us": 0.01, "tau_us": 100.0},
            "mc": {"trials": 2000},
        },
    },
    "pr-yso": {
        "description": "Pr:Y2SiO5 crystal, ~600 nm transition, N = 10, 100 nm free fall; "
        "no thermal term; fringe period lambda1/4N = 15 nm",
        "scenario": {
            "ensemble": {"n_atoms": 64},
            "protocol": {"n_pairs": 10, "k1_rad_per_um": 2 * math.pi / 0.6, "r0_um": 0.1},
        },
    },
    "noisy-pulses": {
        "description": "noisy pi pulses, dS = 0.1 rad, dPhi = 0.01 rad, N = 16 "
        "(override --n-pairs 32 for the second curve)",
        "scenario": {
            "protocol": {"n_pairs": 16},
            "noise": {"dS_rad": 0.1, "dPhi_rad": 0.01},
            "mc": {"trials": 500},
        },
    },
}


def _merge(base: dict, update: dict) -> dict:
    out = copy.deepcopy(base)
    for section, values in update.items():
        if section not in SCHEMA:
            raise ScenarioError(f"unknown section {section!r}")
        if values is None:
            out[section] = None
            continue
        if not isinstance(values, dict):
            raise ScenarioError(f"section {section!r} must be an object or null")
        if out.get(section) is None:
            if section == "noise":
                out[section] = dict(NOISE_DEFAULTS)
            elif section == "thermal":
                out[section] = dict(THERMAL_DEFAULTS)
            else:
                out[section] = {}
        for key, val in values.items():
            if key not in SCHEMA[section]:
                raise ScenarioError(f"unknown key {section}.{key}")
            out[section][key] = val
    return out


def _check_type(path: str, value, kind: type, nullable: bool):
    if value is None:
        if nullable:
            return None
        raise ScenarioError(f"{path}: must not be null")
    if kind is bool:
        if not isinstance(value, bool):
            raise ScenarioError(f"{path}: expected true/false, got {value!r}")
        return value
    if isinstance(value, bool):
        raise ScenarioError(f"{path}: expected a number, got {value!r}")
    if kind is int:
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if not isinstance(value, int):
            raise ScenarioError(f"{path}: expected an integer, got {value!r}")
        return value
    if kind is float:
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ScenarioError(f"{path}: expected a finite number, got {value!r}")
        return float(value)
    if kind is str:
        if not isinstance(value, str):
            raise ScenarioError(f"{path}: expected a string, got {value!r}")
        return value
    if kind is list:
        if not isinstance(value, list):
            raise ScenarioError(f"{path}: expected a list, got {value!r}")
        return [_check_type(f"{path}[{i}]", v, float, False) for i, v in enumerate(value)]
    raise AssertionError(kind)


def validate_scenario(doc: dict) -> dict:
    """Type- and range-check a fully merged scenario; returns a normalised copy."""
    out = {}
    for section, keys in SCHEMA.items():
        values = doc.get(section)
        if values is None:
            if section not in OPTIONAL_SECTIONS:
                raise ScenarioError(f"section {section!r} is required")
            out[section] = None
            continue
        missing = [k for k in keys if k not in values]
        if missing:
            raise ScenarioError(f"{section}.{missing[0]}: missing")
        out[section] = {
            k: _check_type(f"{section}.{k}", values[k], *keys[k]) for k in keys
        }

    ens, proto = out["ensemble"], out["protocol"]
    if ens["positions"] is not None:
        if not ens["positions"]:
            raise ScenarioError("ensemble.positions: must not be empty")
        ens["n_atoms"] = len(ens["positions"])
    if ens["n_atoms"] < 1:
        raise ScenarioError("ensemble.n_atoms: must be >= 1")
    if ens["length_um"] is not None and ens["length_um"] <= 0:
        raise ScenarioError("ensemble.length_um: must be > 0")
    if not 0 <= ens["seed"] < 2**64:
        raise ScenarioError("ensemble.seed: must be an unsigned 64-bit integer")
    if proto["n_pairs"] < 0:
        raise ScenarioError("protocol.n_pairs: must be >= 0")
    if proto["k1_rad_per_um"] <= 0:
        raise ScenarioError("protocol.k1_rad_per_um: must be > 0")
    noise = out["noise"]
    if noise is not None:
        for key in ("dS_rad", "dPhi_rad"):
            if noise[key] < 0:
                raise ScenarioError(f"noise.{key}: must be >= 0")
        if not 0 < noise["retention"] <= 1:
            raise ScenarioError("noise.retention: must lie in (0, 1]")
        if noise["stages"] not in NOISE_STAGES:
            raise ScenarioError(f"noise.stages: must be one of {', '.join(NOISE_STAGES)}")
    thermal = out["thermal"]
    if thermal is not None:
        for key in THERMAL_DEFAULTS:
            if thermal[key] < 0:
                raise ScenarioError(f"thermal.{key}: must be >= 0")
    scan = out["scan"]
    if scan is not None:
        if scan["points"] < 1:
            raise ScenarioError("scan.points: must be >= 1")
        if scan["points"] > 1 and scan["r0_max"] <= scan["r0_min"]:
            raise ScenarioError("scan.r0_max: must exceed scan.r0_min")
    if out["mc"]["trials"] < 1:
        raise ScenarioError("mc.trials: must be >= 1")
    return out


def config_from_scenario(sc: dict) -> ProtocolConfig:
    ens, proto = sc["ensemble"], sc["protocol"]
    noise = thermal = None
    if sc["noise"] is not None:
        n = sc["noise"]
        noise = NoiseParams(n["dS_rad"], n["dPhi_rad"], n["retention"], n["stages"], n["half_pulses"])
    if sc["thermal"] is not None:
        t = sc["thermal"]
        thermal = ThermalParams(t["vm_um_per_us"], t["tau_us"], t["drift_fraction"])
    positions = tuple(ens["positions"]) if ens["positions"] is not None else None
    return ProtocolConfig(
        n_pairs=proto["n_pairs"],
        k1=proto["k1_rad_per_um"],
        n_atoms=ens["n_atoms"],
        r0=proto["r0_um"],
        noise=noise,
        thermal=thermal,
        seed=ens["seed"],
        length=ens["length_um"],
        positions=positions,
    )


def _load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ScenarioError(f"config {path} must hold a JSON object")
    # a report written by --out carries its resolved scenario under "config"
    if doc.get("tool") == "srmetro" and isinstance(doc.get("config"), dict):
        doc = doc["config"]
    return doc


# flag dest -> (section, key); None section marks special handling
OVERRIDES = {
    "n_pairs": ("protocol", "n_pairs"),
    "k1": ("protocol", "k1_rad_per_um"),
    "r0": ("protocol", "r0_um"),
    "n_atoms": ("ensemble", "n_atoms"),
    "length": ("ensemble", "length_um"),
    "seed": ("ensemble", "seed"),
    "dS": ("noise", "dS_rad"),
    "dPhi": ("noise", "dPhi_rad"),
    "retention": ("noise", "retention"),
    "noise_stages": ("noise", "stages"),
    "noisy_half_pulses": ("noise", "half_pulses"),
    "vm": ("thermal", "vm_um_per_us"),
    "tau": ("thermal", "tau_us"),
    "drift_fraction": ("thermal", "drift_fraction"),
    "r0_min": ("scan", "r0_min"),
    "r0_max": ("scan", "r0_max"),
    "points": ("scan", "points"),
    "trials": ("mc", "trials"),
}


def resolve_scenario(args) -> dict:
    doc = copy.deepcopy(BASE_SCENARIO)
    if args.preset is not None:
        if args.preset not in PRESETS:
            raise ScenarioError(f"unknown preset {args.preset!r}; try: {', '.join(PRESETS)}")
        doc = _merge(doc, PRESETS[args.preset]["scenario"])
    if args.config is not None:
        doc = _merge(doc, _load_json(args.config))

    if getattr(args, "ideal", False):
        doc["noise"] = None
        doc["thermal"] = None
    updates: dict = {}
    if getattr(args, "lambda1", None) is not None:
        if args.lambda1 <= 0:
            raise ScenarioError("--lambda1: must be > 0")
        updates.setdefault("protocol", {})["k1_rad_per_um"] = 2 * math.pi / args.lambda1
    for dest, (section, key) in OVERRIDES.items():
        value = getattr(args, dest, None)
        if value is not None:
            updates.setdefault(section, {})[key] = value
    if updates.get("scan") and doc.get("scan") is None:
        missing = {"r0_min", "r0_max", "points"} - set(updates["scan"])
        if missing:
            raise ScenarioError(f"scan.{sorted(missing)[0]}: missing (no scan section to extend)")
    doc = _merge(doc, updates)
    return validate_scenario(doc)


# --- reports ------------------------------------------------------------------


def _limits(n_pairs: int) -> dict | None:
    if n_pairs < 1:
        return None
    return {"heisenberg": 1 / (4 * n_pairs), "shot_noise": 1 / math.sqrt(4 * n_pairs)}


def _report(command: str, scenario: dict) -> dict:
    return {
        "tool": "srmetro",
        "version": __version__,
        "command": command,
        "backend": BACKEND,
        "seed": scenario["ensemble"]["seed"],
        "config": scenario,
    }


def _dump(report: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, allow_nan=True)
        fh.write("\n")


def _fmt_inv(x: float) -> str:
    return f"{x:.6g} (1/{1 / x:.4g})" if x else "0"


def analytic_expectation(config: ProtocolConfig) -> dict:
    """Closed-form visibility and sensitivity for a configuration.

    Visibility is (1 - N dS^2/2) x thermal envelope x retention and the
    sensitivity 1/(4N V) + dPhi/sqrt(4N); each factor reduces to the
    corresponding single-effect formula when the others are absent.
    """
    n = config.n_pairs
    vis = 1.0
    dphi = 0.0
    if config.noise is not None:
        vis *= (1 - n * config.noise.dS**2 / 2) * config.noise.retention
        dphi = config.noise.dPhi
    env = None
    if config.thermal is not None:
        env = thermal_envelope(n, config.k1, config.thermal.v_m, config.thermal.tau)
        vis *= env
    out = {
        "visibility": vis,
        "thermal_envelope": env,
        "signal": vis * ideal_signal(n, config.k1, config.r0),
        "delta": None,
    }
    if n >= 1 and vis > 0:
        out["delta"] = 1 / (4 * n * vis) + dphi / math.sqrt(4 * n)
    return out


def _sensitivity_dict(delta: float | None, n_pairs: int, delta_err: float | None = None) -> dict | None:
    lim = _limits(n_pairs)
    if lim is None or delta is None:
        return None
    out = {
        "delta": delta,
        "heisenberg": lim["heisenberg"],
        "shot_noise": lim["shot_noise"],
        "ratio_to_heisenberg": delta / lim["heisenberg"],
        "ratio_to_shot_noise": delta / lim["shot_noise"],
    }
    if delta_err is not None:
        out["delta_err"] = delta_err
    return out


def cmd_run(args, out=None) -> dict:
    out = out or sys.stdout
    t0 = time.perf_counter()
    scenario = resolve_scenario(args)
    config = config_from_scenario(scenario)
    # thermal motion is reported analytically; the readout is the frozen-atom shot
    readout = run_protocol(config.replace(thermal=None))
    expect = analytic_expectation(config)
    n = config.n_pairs
    report = _report("run", scenario)
    report["readout"] = {"P_b": readout.P_b, "P_a": readout.P_a, "P": readout.P}
    report["ideal_signal"] = ideal_signal(n, config.k1, config.r0)
    report["analytic"] = expect
    report["sensitivity"] = _sensitivity_dict(expect["delta"], n)
    report["limits"] = _limits(n)
    report["fringe_period_um"] = config.wavelength / (4 * n) if n else None
    report["duration_s"] = time.perf_counter() - t0

    print(f"srmetro run  N={n}  k1={config.k1:.6g} rad/um  lambda1={config.wavelength:.6g} um  "
          f"r0={config.r0:.6g} um  atoms={config.n_atoms}  seed={config.seed}", file=out)
    print(f"readout      P_b={readout.P_b:.12f}  P_a={readout.P_a:.12f}  P={readout.P:.12f}", file=out)
    print(f"ideal        P=-cos(4N k1 r0)={report['ideal_signal']:.12f}", file=out)
    if n:
        print(f"fringe       period lambda1/{4 * n} = {report['fringe_period_um']:.6g} um", file=out)
    if expect["thermal_envelope"] is not None:
        print(f"thermal      envelope={expect['thermal_envelope']:.4f}  "
              f"expected P={expect['signal']:.6f}", file=out)
    if expect["visibility"] != 1.0:
        print(f"visibility   {expect['visibility']:.4f} (analytic)", file=out)
    sens = report["sensitivity"]
    if sens is not None:
        print(f"sensitivity  delta={_fmt_inv(sens['delta'])}  heisenberg={_fmt_inv(sens['heisenberg'])}  "
              f"shot-noise={_fmt_inv(sens['shot_noise'])}", file=out)
    return report


def _scan_grid(scenario: dict, config: ProtocolConfig) -> np.ndarray:
    sc = scenario["scan"]
    if sc is None:
        return default_r0_grid(config.n_pairs, config.k1)
    if sc["points"] == 1:
        return np.array([sc["r0_min"]])
    return np.linspace(sc["r0_min"], sc["r0_max"], sc["points"])


def _scan_csv(scan) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k1r0", "P", "stderr"])
    for i in range(scan.grid.size):
        se = "" if scan.stderr is None else repr(float(scan.stderr[i]))
        writer.writerow([repr(float(scan.grid[i])), repr(float(scan.P[i])), se])
    return buf.getvalue()


def _fit_and_report(scan, config: ProtocolConfig):
    n = config.n_pairs
    if n < 1 or scan.grid.size < 5:
        return None, None
    fit = fit_cosine(scan, 4 * n)
    rep = sensitivity_from_fit(fit, n)
    fit_d = {
        "visibility": fit.visibility,
        "frequency": fit.frequency,
        "phase": fit.phase,
        "residual_rms": fit.residual_rms,
        "visibility_err": fit.visibility_err,
        "frequency_err": fit.frequency_err,
    }
    return fit_d, _sensitivity_dict(rep.delta, n, rep.delta_err)


def cmd_scan(args, out=None) -> dict:
    out = out or sys.stdout
    t0 = time.perf_counter()
    scenario = resolve_scenario(args)
    config = config_from_scenario(scenario)
    grid = _scan_grid(scenario, config)
    trials = scenario["mc"]["trials"]
    scan = scan_fringe(config, grid, trials=trials, threads=args.threads)
    fit, sens = _fit_and_report(scan, config)
    report = _report("scan", scenario)
    report["scan"] = {
        "source": scan.source,
        "trials": trials if scan.source != "ideal" else None,
        "k1r0": scan.grid.tolist(),
        "P": scan.P.tolist(),
        "stderr": None if scan.stderr is None else scan.stderr.tolist(),
    }
    report["fit"] = fit
    report["sensitivity"] = sens
    report["analytic"] = analytic_expectation(config)
    report["limits"] = _limits(config.n_pairs)
    report["duration_s"] = time.perf_counter() - t0

    table = _scan_csv(scan)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(table)
    print(f"srmetro scan  N={config.n_pairs}  source={scan.source}  points={scan.grid.size}"
          + (f"  trials={trials}" if scan.source != "ideal" else ""), file=out)
    if fit is not None:
        print(f"fit          V={fit['visibility']:.4f}+-{fit['visibility_err']:.4f}  "
              f"f={fit['frequency']:.4f}+-{fit['frequency_err']:.4f}  "
              f"theta={fit['phase']:.4f}  rms={fit['residual_rms']:.3g}", file=out)
        print(f"period       lambda1/{fit['frequency']:.2f}  (ideal lambda1/{4 * config.n_pairs})", file=out)
        print(f"sensitivity  delta={_fmt_inv(sens['delta'])}  heisenberg={_fmt_inv(sens['heisenberg'])}  "
              f"shot-noise={_fmt_inv(sens['shot_noise'])}", file=out)
        if report["analytic"]["delta"] is not None:
            print(f"analytic     delta={_fmt_inv(report['analytic']['delta'])}", file=out)
    if not args.csv:
        out.write(table)
    return report


def _parse_n_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ScenarioError(f"--n-pairs: expected comma-separated integers, got {text!r}") from exc
    if not values or min(values) < 1:
        raise ScenarioError("--n-pairs: need one or more integers >= 1")
    return values


def cmd_sweep(args, out=None) -> dict:
    out = out or sys.stdout
    t0 = time.perf_counter()
    n_values = _parse_n_list(args.n_pairs_list)
    scenario = resolve_scenario(args)
    base = config_from_scenario(scenario)
    trials = scenario["mc"]["trials"]
    rows = []
    for n in n_values:
        config = base.replace(n_pairs=n)
        scan = scan_fringe(config, default_r0_grid(n, config.k1), trials=trials, threads=args.threads)
        fit, sens = _fit_and_report(scan, config)
        rows.append({
            "N": n,
            "delta": sens["delta"],
            "heisenberg": sens["heisenberg"],
            "shot_noise": sens["shot_noise"],
            "visibility": fit["visibility"],
            "delta_err": sens["delta_err"],
            "analytic_delta": analytic_expectation(config)["delta"],
            "source": scan.source,
        })
    report = _report("sweep", scenario)
    report["n_pairs"] = n_values
    report["rows"] = rows
    report["duration_s"] = time.perf_counter() - t0

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["N", "delta", "heisenberg", "shot_noise", "visibility"])
    for r in rows:
        writer.writerow([r["N"]] + [repr(float(r[k])) for k in ("delta", "heisenberg", "shot_noise", "visibility")])
    table = buf.getvalue()
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(table)
        for r in rows:
            print(f"N={r['N']:<4d} delta={_fmt_inv(r['delta'])}  heisenberg={_fmt_inv(r['heisenberg'])}  "
                  f"shot-noise={_fmt_inv(r['shot_noise'])}  V={r['visibility']:.4f}", file=out)
    else:
        out.write(table)
    return report


def oracle_checks(n_atoms: int, cases: int, seed: int) -> dict:
    """Closed form vs dense exponential on random cases, plus full-space leakage."""
    if n_atoms < 1:
        raise InvalidInputError("n_atoms must be >= 1")
    if n_atoms > MAX_FULL_SPACE_ATOMS:
        raise OracleScaleError(f"oracle scale exceeded: n_atoms <= {MAX_FULL_SPACE_ATOMS}")
    rng = stream(seed, 99)
    max_dev = 0.0
    for _ in range(cases):
        ens = AtomEnsemble(rng.uniform(-5.0, 5.0, n_atoms))
        vec = rng.normal(size=2 * n_atoms) + 1j * rng.normal(size=2 * n_atoms)
        state = ExcitationState.from_vector(vec / np.linalg.norm(vec))
        pulse = Pulse(rng.uniform(0, 2 * math.pi), rng.uniform(-3, 3), rng.uniform(-math.pi, math.pi))
        a = apply_pulse(state, ens, pulse)
        b = expm_apply(generator_matrix(ens, pulse), state)
        max_dev = max(max_dev, float(np.max(np.abs(a.to_vector() - b.to_vector()))))
    full = [
        full_space_check(n_atoms, Pulse(math.pi, 1.0, 0.0)),
        full_space_check(n_atoms, Pulse(math.pi / 2, 0.0, float(rng.uniform(-math.pi, math.pi)))),
        full_space_check(n_atoms, Pulse(float(rng.uniform(0, 2 * math.pi)), -2.3, 0.4), dicke_k=0.7),
    ]
    leakage = max(r.max_leakage for r in full)
    full_dev = max(r.max_deviation for r in full)
    checks = {
        "closed_form_vs_expm": {"max_deviation": max_dev, "tolerance": ORACLE_TOL, "passed": max_dev < ORACLE_TOL},
        "full_space_leakage": {"max_leakage": leakage, "tolerance": LEAKAGE_TOL, "passed": leakage < LEAKAGE_TOL},
        "full_space_vs_closed_form": {"max_deviation": full_dev, "tolerance": ORACLE_TOL, "passed": full_dev < ORACLE_TOL},
    }
    return {"n_atoms": n_atoms, "cases": cases, "checks": checks,
            "passed": all(c["passed"] for c in checks.values())}


def cmd_oracle_check(args, out=None) -> dict:
    out = out or sys.stdout
    t0 = time.perf_counter()
    seed = DEFAULT_SEED if args.seed is None else args.seed
    result = oracle_checks(args.n_atoms, args.cases, seed)
    report = {"tool": "srmetro", "version": __version__, "command": "oracle-check", "seed": seed}
    report.update(result)
    report["duration_s"] = time.perf_counter() - t0
    for name, c in result["checks"].items():
        value = c.get("max_deviation", c.get("max_leakage"))
        print(f"{'PASS' if c['passed'] else 'FAIL'}  {name:<26s} {value:.3e}  (< {c['tolerance']:.0e})", file=out)
    return report


def cmd_presets(args, out=None) -> dict:
    out = out or sys.stdout
    listing = {}
    for name, p in PRESETS.items():
        listing[name] = {"description": p["description"],
                         "scenario": _merge(BASE_SCENARIO, p["scenario"])}
    if args.preset_name:
        if args.preset_name not in PRESETS:
            raise ScenarioError(f"unknown preset {args.preset_name!r}")
        listing = {args.preset_name: listing[args.preset_name]}
    json.dump(listing, out, indent=2)
    out.write("\n")
    return {"tool": "srmetro", "version": __version__, "command": "presets", "presets": listing}


# --- argument parsing ---------------------------------------------------------


def _add_scenario_flags(p: argparse.ArgumentParser, n_pairs_list: bool = False):
    p.add_argument("--preset", help=f"start from a named scenario ({', '.join(PRESETS)})")
    p.add_argument("--config", help="scenario JSON (or a report written by --out)")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--seed", type=int, help="master seed (default: fixed constant)")
    p.add_argument("--trials", type=int, help="Monte Carlo trials per grid point")
    p.add_argument("--threads", type=int, default=1, help="worker threads for Monte Carlo")
    p.add_argument("--ideal", action="store_true", help="drop noise and thermal sections")
    g = p.add_argument_group("protocol")
    if n_pairs_list:
        g.add_argument("--n-pairs", dest="n_pairs_list", required=True,
                       help="comma-separated list of N values")
    else:
        g.add_argument("--n-pairs", type=int, help="pulse-pair count N")
    g.add_argument("--k1", type=float, help="effective wavenumber, rad/um")
    g.add_argument("--lambda1", type=float, help="effective wavelength, um (sets k1)")
    g.add_argument("--r0", type=float, help="displacement, um")
    g.add_argument("--n-atoms", type=int)
    g.add_argument("--length", type=float, help="ensemble length, um")
    g = p.add_argument_group("noise")
    g.add_argument("--dS", type=float, help="pi-pulse area std, rad")
    g.add_argument("--dPhi", type=float, help="pulse phase std, rad")
    g.add_argument("--retention", type=float, help="surviving atom fraction eta")
    g.add_argument("--noise-stages", choices=NOISE_STAGES)
    g.add_argument("--noisy-half-pulses", action="store_true", default=None)
    g = p.add_argument_group("thermal")
    g.add_argument("--vm", type=float, help="most probable speed, um/us")
    g.add_argument("--tau", type=float, help="measurement duration, us")
    g.add_argument("--drift-fraction", type=float, help="free-drift time as a fraction of tau")
    g = p.add_argument_group("scan")
    g.add_argument("--r0-min", type=float)
    g.add_argument("--r0-max", type=float)
    g.add_argument("--points", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="srmetro", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"srmetro {__version__} ({BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="single protocol execution")
    _add_scenario_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("scan", help="fringe scan, fit and sensitivity")
    _add_scenario_flags(p)
    p.add_argument("--csv", help="write k1r0,P,stderr here instead of standard output")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("sweep", help="sensitivity versus N")
    _add_scenario_flags(p, n_pairs_list=True)
    p.add_argument("--csv", help="write N,delta,heisenberg,shot_noise,visibility here")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle-check", help="closed form versus brute-force references")
    p.add_argument("--n-atoms", type=int, default=3)
    p.add_argument("--cases", type=int, default=50)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("presets", help="list built-in scenarios")
    p.add_argument("preset_name", nargs="?")
    p.add_argument("--out")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
        if getattr(args, "out", None):
            _dump(report, args.out)
    except InvalidInputError as exc:
        print(f"srmetro: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (MetrologyError, OSError, FloatingPointError) as exc:
        print(f"srmetro: failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    if args.command == "oracle-check" and not report["passed"]:
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
