"""Analog and digital Jaynes-Cummings chevrons.

A chevron maps the qubit-resonator exchange from ``|1, 0>`` against qubit
detuning and interaction time. In the digital variant the interaction is
split into on-pulses of length ``pulse_len``; between pulses the qubit
accrues an off-window phase that is modelled as an instantaneous ``sz``
rotation. Whenever the phase accrued per cycle, ``2 pi Delta pulse_len +
off_phase``, is a multiple of ``2 pi`` the pulses add coherently, so the
digital chevron shows satellite resonances spaced by ``1/pulse_len``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .hilbert import SpaceSpec, basis_state
from .models import build_jc
from .trotter import rz

__all__ = [
    "ChevronSpec",
    "ChevronResult",
    "OBSERVABLES",
    "run_chevron",
    "find_compensation_phase",
    "transfer_profile",
    "find_resonances",
    "satellite_detunings",
]

OBSERVABLES = ("qubit_excitation", "mean_photon", "photon_parity")

# single-excitation dynamics from |1,0> never leave n <= 1
_SPACE = SpaceSpec(1)


@dataclass(frozen=True)
class ChevronSpec:
    """Detunings in MHz, durations (total on-time) and pulse length in us, phases in rad."""

    detunings: tuple
    durations: tuple
    mode: str = "analog"
    pulse_len: float = 0.020
    off_phase: float = 0.0
    compensation: float = 0.0
    g: float = 1.95

    def __post_init__(self):
        det = tuple(float(x) for x in self.detunings)
        dur = tuple(float(x) for x in self.durations)
        if not det or not dur:
            raise ValueError("detuning and duration grids must be non-empty")
        if any(b < a for a, b in zip(det, det[1:])) or any(b < a for a, b in zip(dur, dur[1:])):
            raise ValueError("grids must be sorted")
        if dur[0] < 0:
            raise ValueError("durations must be non-negative")
        if self.mode not in ("analog", "digital"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "digital" and not self.pulse_len > 0:
            raise ValueError("pulse_len must be positive in digital mode")
        if not self.g > 0:
            raise ValueError("g must be positive")
        object.__setattr__(self, "detunings", det)
        object.__setattr__(self, "durations", dur)

    @property
    def window_phase(self) -> float:
        """Net qubit phase applied in each off-window."""
        return self.off_phase + self.compensation

    def replace(self, **kw) -> "ChevronSpec":
        from dataclasses import replace

        return replace(self, **kw)


@dataclass(frozen=True)
class ChevronResult:
    """``grid[i, j]`` is the observable after ``durations[i]`` at ``detunings[j]``."""

    grid: np.ndarray
    detunings: np.ndarray
    durations: np.ndarray
    observable: str


def _observable(vecs: np.ndarray, observable: str) -> np.ndarray:
    # vecs: (n_t, 4) amplitudes in the basis |0,0>, |0,1>, |1,0>, |1,1>
    p = np.abs(vecs) ** 2
    if observable == "qubit_excitation":
        return p[:, 2] + p[:, 3]
    if observable == "mean_photon":
        return p[:, 1] + p[:, 3]
    if observable == "photon_parity":
        return p[:, 0] + p[:, 2]
    raise ValueError(f"unknown observable {observable!r}; choose from {OBSERVABLES}")


def _column(spec: ChevronSpec, delta: float, psi0: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(build_jc(spec.g, 0.0, delta, _SPACE))
    c0 = v.conj().T @ psi0
    t = np.asarray(spec.durations)
    if spec.mode == "analog":
        return (v @ (np.exp(-1j * np.outer(w, t)) * c0[:, None])).T
    T = spec.pulse_len
    k_full = np.floor(t / T + 1e-9).astype(int)
    rem = t - k_full * T
    rem[rem < 1e-12 * T] = 0.0
    u_on = (v * np.exp(-1j * w * T)) @ v.conj().T
    win = np.kron(rz(spec.window_phase), np.eye(_SPACE.dim_res))
    out = np.empty((len(t), len(psi0)), dtype=complex)
    psi = psi0.copy()
    done = 0
    for i, (k, r) in enumerate(zip(k_full, rem)):
        while done < k:
            if done:
                psi = win @ psi
            psi = u_on @ psi
            done += 1
        if r == 0:
            out[i] = psi
        else:
            x = win @ psi if k else psi
            out[i] = (v * np.exp(-1j * w * r)) @ (v.conj().T @ x)
    return out


def run_chevron(spec: ChevronSpec, observable: str = "qubit_excitation") -> ChevronResult:
    """Evolve ``|1, 0>`` for every (duration, detuning) and record ``observable``."""
    if observable not in OBSERVABLES:
        raise ValueError(f"unknown observable {observable!r}; choose from {OBSERVABLES}")
    psi0 = basis_state(1, 0, _SPACE).data
    cols = [_observable(_column(spec, d, psi0), observable) for d in spec.detunings]
    return ChevronResult(np.stack(cols, axis=1), np.array(spec.detunings), np.array(spec.durations),
                         observable)


def transfer_profile(spec: ChevronSpec) -> np.ndarray:
    """Largest photon transfer reached at each detuning, ``max_t (1 - P_exc)``."""
    res = run_chevron(spec, "qubit_excitation")
    return np.max(1 - res.grid, axis=0)


def find_resonances(spec: ChevronSpec, min_height: float = 0.1) -> np.ndarray:
    """Detunings of local maxima of the transfer profile."""
    prof = transfer_profile(spec)
    padded = np.concatenate([[-np.inf], prof, [-np.inf]])
    idx, _ = find_peaks(padded, height=min_height)
    return np.asarray(spec.detunings)[idx - 1]


def satellite_detunings(spec: ChevronSpec, orders=range(-3, 4)) -> np.ndarray:
    """Predicted digital resonances ``(k - phase/2 pi)/pulse_len`` (MHz)."""
    ph = spec.window_phase
    return np.array([(k - ph / (2 * math.pi)) / spec.pulse_len for k in orders])


def _swap_contrast(spec: ChevronSpec) -> float:
    p = run_chevron(spec.replace(detunings=(0.0,)), "qubit_excitation").grid[:, 0]
    return float(np.max(p) - np.min(p))


def find_compensation_phase(spec: ChevronSpec, n_phase: int = 360) -> float:
    """Compensation phase (mod 2 pi) maximising the on-resonance swap contrast.

    Sweeps the phase added to every off-window on a uniform grid of
    ``n_phase`` points; the best compensation cancels ``off_phase``. In
    analog mode, or without any off-window phase, the answer is 0.
    """
    if spec.mode == "analog":
        return 0.0
    phases = 2 * math.pi * np.arange(n_phase) / n_phase
    contrast = np.array([_swap_contrast(spec.replace(compensation=c)) for c in phases])
    best = float(phases[int(np.argmax(contrast))])
    return best % (2 * math.pi)
