"""Experiment configuration: INI sections with strict, typed keys.

Example::

    [experiment]
    name = parity_chevron
    seed = 1

    [physics]
    g = 1.95

    [sweep]
    omega_ratio = linspace(-3.2, 3.2, 33)

Lists are comma separated or ``linspace(start, stop, num)``; ``inf`` is
accepted wherever a float is. Unknown sections or keys are rejected.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

__all__ = [
    "ConfigError",
    "EXPERIMENTS",
    "SCHEMA",
    "Config",
    "load_config",
    "parse_config_text",
    "parse_float_list",
]

EXPERIMENTS: dict[str, str] = {
    "parity_chevron": "qubit and photon parity vs Trotter step and omega_rR/g (collapse-revival chevrons)",
    "photon_chevron": "mean photon number and emulated photon-meter readout vs step and omega_rR/g",
    "wigner_movie": "resonator Wigner function after each Trotter step with double-Gaussian trajectory",
    "cat_conditional": "resonator Wigner functions conditioned on the Rabi-qubit outcome",
    "nondegenerate": "parity dynamics for nonzero simulated qubit frequency, Trotter vs ideal Rabi",
    "trotter_compare": "first- vs second-order Trotter parity chevrons",
    "stepsize_compare": "parity chevrons for several Trotter step sizes at fixed simulated time",
    "entropy_chevron": "qubit von Neumann entropy vs step and omega_rR/g",
    "jc_chevron": "analog and digital JC chevrons with off-window phase compensation",
    "predistort_demo": "flux predistortion kernels for a synthetic cascade of distortions",
    "init_compare": "parity dynamics from |0,0> vs |1,0>",
}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending ``section.key``."""


_LINSPACE = re.compile(r"^\s*linspace\(\s*([^,]+),\s*([^,]+),\s*([^,\)]+)\)\s*$")


def _float(s: str) -> float:
    s = s.strip()
    try:
        return float(s)
    except ValueError:
        raise ValueError(f"not a number: {s!r}") from None


def parse_float_list(s: str) -> tuple[float, ...]:
    """``"1, 2, inf"`` or ``"linspace(a, b, n)"`` to a tuple of floats."""
    if s.strip() == "":
        return ()
    m = _LINSPACE.match(s)
    if m:
        n = int(_float(m.group(3)))
        if n < 1:
            raise ValueError("linspace needs num >= 1")
        return tuple(float(x) for x in np.linspace(_float(m.group(1)), _float(m.group(2)), n))
    return tuple(_float(x) for x in s.split(","))


def _int(s: str) -> int:
    v = _float(s)
    if v != int(v):
        raise ValueError(f"not an integer: {s!r}")
    return int(v)


def _int_list(s: str) -> tuple[int, ...]:
    return tuple(_int(x) for x in s.split(",")) if s.strip() else ()


def _choice(*opts: str) -> Callable[[str], str]:
    def parse(s: str) -> str:
        s = s.strip()
        if s not in opts:
            raise ValueError(f"must be one of {', '.join(opts)}; got {s!r}")
        return s

    return parse


def _auto_int(s: str):
    s = s.strip()
    return "auto" if s == "auto" else _int(s)


def _str(s: str) -> str:
    return s.strip()


@dataclass(frozen=True)
class Key:
    parse: Callable[[str], Any]
    default: Any
    doc: str
    check: Callable[[Any], str | None] | None = None


def _positive(v):
    return None if v > 0 else "must be positive"


def _nonneg(v):
    return None if v >= 0 else "must be non-negative"


def _all_positive(v):
    return None if all(x > 0 for x in v) else "all values must be positive"


SCHEMA: dict[str, dict[str, Key]] = {
    "experiment": {
        "name": Key(_choice(*EXPERIMENTS), None, "experiment to run"),
        "seed": Key(_int, 0, "seed for sampling layers"),
    },
    "physics": {
        "g": Key(_float, 1.95, "coupling g/2pi (MHz)", _positive),
        "t1_res": Key(_float, math.inf, "resonator T1 (us); inf disables decay", _positive),
        "kerr": Key(_float, 0.0, "self-Kerr K/2pi (MHz); exact engine only"),
        "n_max": Key(_auto_int, "auto", "photon truncation or 'auto' (truncation guard)"),
        "omega_q_ratio": Key(parse_float_list, (), "g_R/omega_qR values (nondegenerate)", _all_positive),
        "initial": Key(_choice("1", "0", "+", "-"), "1", "initial qubit state; resonator starts in vacuum"),
    },
    "plan": {
        "tau": Key(_float, 0.020, "simulated Trotter step (us)", _positive),
        "n_steps": Key(_int, 60, "number of Trotter steps", _positive),
        "order": Key(lambda s: int(_choice("1", "2")(s)), 2, "Trotter order"),
        "engine": Key(_choice("auto", "trotter", "exact", "lindblad"), "auto",
                      "auto: trotter without decay, lindblad (Trotter with decay) otherwise"),
        "decay_mode": Key(_choice("continuous", "between"), "continuous", "where decay acts"),
        "idle_per_step": Key(_float, 0.0, "decay-only time per step (us)", _nonneg),
        "taus": Key(parse_float_list, (0.020, 0.030, 0.040, 0.050), "step sizes (stepsize_compare, us)",
                    _all_positive),
        "total_time": Key(_float, 1.2, "simulated time (stepsize_compare, us)", _positive),
    },
    "sweep": {
        "r": Key(parse_float_list, None, "coupling ratios g_R/omega_rR (inf allowed)"),
        "omega_ratio": Key(parse_float_list, None, "omega_rR/g_R values"),
        "steps": Key(_int_list, (), "Trotter steps per r (cat_conditional)"),
        "detunings": Key(parse_float_list, tuple(np.linspace(-80, 80, 81)), "qubit detunings (MHz)"),
        "durations": Key(parse_float_list, tuple(np.linspace(0, 2.0, 101)), "interaction times (us)"),
        "pulse_len": Key(_float, 0.020, "digital JC on-pulse (us)", _positive),
        "off_phase": Key(_float, 1.3, "uncompensated off-window phase (rad)"),
        "wigner_extent": Key(_float, 4.0, "Wigner grid half-width", _positive),
        "wigner_points": Key(_int, 41, "Wigner grid points per axis", _positive),
    },
    "meter": {
        "variant": Key(_choice("none", "ldr", "hdr", "parity", "custom"), "none", "photon meter"),
        "tau_eff": Key(_float, 0.0187, "Ramsey separation (us), custom variant", _positive),
        "chi2": Key(_float, -1.26, "dispersive shift 2chi/2pi (MHz)"),
        "d": Key(_float, 3.0, "refocus photon number, custom variant"),
        "shots": Key(_int, 0, "shots per point; 0 for noiseless", _nonneg),
    },
    "predistort": {
        "dt_ns": Key(_float, 1.0, "sampling period (ns)", _positive),
        "length_ns": Key(_float, 30000.0, "trace length (ns)", _positive),
        "bias_tee_tau1_us": Key(_float, 9.7, "bias-tee high-pass pole (us)", _positive),
        "bias_tee_tau2_us": Key(_float, 30.0, "second high-pass pole (us)", _positive),
        "skin_db": Key(_float, 1.7, "skin-effect attenuation at 1 GHz (dB)", _nonneg),
    },
    "output": {
        "dir": Key(_str, "out", "output directory"),
        "prefix": Key(_str, "", "file-name prefix (default: experiment name)"),
    },
}

#: meter presets: (tau_eff us, refocus photon number d)
METER_PRESETS = {"ldr": (0.0187, 3.0), "hdr": (0.0065, 7.0)}

_SYMMETRIC = tuple(float(x) for x in np.linspace(-3.2, 3.2, 33))

#: per-experiment defaults, applied to keys the user did not set
EXPERIMENT_DEFAULTS: dict[str, dict[str, Any]] = {
    "parity_chevron": {"sweep.omega_ratio": _SYMMETRIC},
    "photon_chevron": {"sweep.omega_ratio": _SYMMETRIC, "meter.variant": "ldr"},
    "wigner_movie": {"physics.g": 1.79, "sweep.r": (0.9,), "plan.n_steps": 26},
    "cat_conditional": {"physics.g": 1.79, "sweep.r": (0.9, 2.1), "sweep.steps": (10, 8)},
    "nondegenerate": {"sweep.omega_ratio": tuple(float(x) for x in np.linspace(0.5, 3.0, 11)),
                      "physics.omega_q_ratio": (4.0, 2.0, 1.0)},
    "trotter_compare": {"sweep.omega_ratio": _SYMMETRIC},
    "stepsize_compare": {"sweep.omega_ratio": _SYMMETRIC},
    "entropy_chevron": {"sweep.omega_ratio": _SYMMETRIC},
    "jc_chevron": {},
    "predistort_demo": {},
    "init_compare": {"sweep.omega_ratio": _SYMMETRIC},
}

# keys that never affect results (excluded from the config hash)
_NON_RESULT_KEYS = {("output", "dir")}


@dataclass
class Config:
    values: dict[str, dict[str, Any]]
    explicit: set[tuple[str, str]] = field(default_factory=set)

    def __getitem__(self, path: str) -> Any:
        sec, key = path.split(".", 1)
        return self.values[sec][key]

    @property
    def name(self) -> str:
        return self.values["experiment"]["name"]

    def is_set(self, path: str) -> bool:
        return tuple(path.split(".", 1)) in self.explicit

    def resolved(self) -> dict[str, dict[str, Any]]:
        """All result-relevant values, for hashing and provenance."""
        return {
            s: {k: v for k, v in kv.items() if (s, k) not in _NON_RESULT_KEYS}
            for s, kv in self.values.items()
        }

    def sweep_ratios(self) -> tuple[str, tuple[float, ...]]:
        """``("r", values)`` or ``("omega_ratio", values)``."""
        r, w = self["sweep.r"], self["sweep.omega_ratio"]
        if r is not None:
            return "r", r
        return "omega_ratio", w


def _parse_value(sec: str, key: str, raw: str) -> Any:
    spec = SCHEMA[sec][key]
    try:
        v = spec.parse(raw)
    except ValueError as exc:
        raise ConfigError(f"{sec}.{key}: {exc}") from None
    if spec.check is not None and v is not None:
        msg = spec.check(v)
        if msg:
            raise ConfigError(f"{sec}.{key}: {msg}")
    return v


def parse_config_text(text: str, overrides: list[str] | None = None) -> Config:
    """Parse INI text plus ``section.key=value`` overrides into a validated config."""
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax: {exc}") from None
    raw: dict[tuple[str, str], str] = {}
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise ConfigError(f"{sec}: unknown section (expected one of {', '.join(SCHEMA)})")
        for key, val in cp.items(sec):
            if key not in SCHEMA[sec]:
                raise ConfigError(f"{sec}.{key}: unknown key")
            raw[(sec, key)] = val
    for ov in overrides or []:
        if "=" not in ov or "." not in ov.split("=", 1)[0]:
            raise ConfigError(f"override {ov!r}: expected section.key=value")
        path, val = ov.split("=", 1)
        sec, key = path.strip().split(".", 1)
        if sec not in SCHEMA:
            raise ConfigError(f"{sec}: unknown section")
        if key not in SCHEMA[sec]:
            raise ConfigError(f"{sec}.{key}: unknown key")
        raw[(sec, key)] = val
    if ("experiment", "name") not in raw:
        raise ConfigError("experiment.name: required")
    values = {s: {k: spec.default for k, spec in keys.items()} for s, keys in SCHEMA.items()}
    name = _parse_value("experiment", "name", raw[("experiment", "name")])
    for path, v in EXPERIMENT_DEFAULTS[name].items():
        s, k = path.split(".", 1)
        values[s][k] = v
    for (s, k), val in raw.items():
        values[s][k] = _parse_value(s, k, val)
    cfg = Config(values, set(raw))
    _validate(cfg)
    return cfg


def load_config(path: str | Path, overrides: list[str] | None = None) -> Config:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc.strerror}") from None
    return parse_config_text(text, overrides)


def _validate(cfg: Config) -> None:
    if cfg.is_set("sweep.r") and cfg.is_set("sweep.omega_ratio"):
        raise ConfigError("sweep.r, sweep.omega_ratio: mutually exclusive")
    if cfg.is_set("sweep.r"):
        cfg.values["sweep"]["omega_ratio"] = None
    elif cfg.is_set("sweep.omega_ratio"):
        cfg.values["sweep"]["r"] = None
    if cfg["sweep.r"] is not None and cfg["sweep.omega_ratio"] is not None:
        cfg.values["sweep"]["omega_ratio"] = None
    r = cfg["sweep.r"]
    if r is not None and any(x == 0 for x in r):
        raise ConfigError("sweep.r: r = 0 is not allowed (use omega_ratio for weak coupling)")
    name = cfg.name
    if name == "cat_conditional":
        kind, vals = cfg.sweep_ratios()
        if len(cfg["sweep.steps"]) not in (1, len(vals)):
            raise ConfigError("sweep.steps: give one value or one per sweep value")
    if name == "photon_chevron" and cfg["meter.variant"] == "hdr" and not cfg.is_set("plan.n_steps"):
        cfg.values["plan"]["n_steps"] = 90
    if name == "jc_chevron":
        for k in ("detunings", "durations"):
            v = cfg[f"sweep.{k}"]
            if not v or any(b < a for a, b in zip(v, v[1:])):
                raise ConfigError(f"sweep.{k}: must be a non-empty sorted list")
    if cfg["meter.variant"] == "custom" and cfg["meter.chi2"] == 0:
        raise ConfigError("meter.chi2: must be non-zero")
    if cfg["plan.engine"] == "exact" and name in ("trotter_compare", "stepsize_compare"):
        raise ConfigError("plan.engine: this experiment compares Trotter sequences; use trotter or auto")
