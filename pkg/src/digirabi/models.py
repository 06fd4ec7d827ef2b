"""Rabi, Jaynes-Cummings and anti-Jaynes-Cummings Hamiltonians.

Public parameters are cyclic frequencies in MHz and times in microseconds.
Every Hamiltonian returned here is in angular units (rad/us), so that
``expm(-1j * H * t)`` with ``t`` in microseconds is the propagator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hilbert import SpaceSpec, annihilation, embed, number, pauli

__all__ = [
    "TWO_PI",
    "RabiParams",
    "DegenerateSolution",
    "build_rabi",
    "build_jc",
    "build_ajc",
    "excitation_number",
    "ajc_charge",
    "total_parity",
    "degenerate_oracle",
    "revival_time",
    "jc_reference_period",
]

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class RabiParams:
    """Simulated Rabi parameters (MHz, cyclic; ``t1_res`` in us)."""

    g_R: float
    omega_rR: float
    omega_qR: float = 0.0
    kerr: float = 0.0
    t1_res: float = math.inf

    def __post_init__(self):
        if not self.g_R > 0:
            raise ValueError(f"g_R must be positive, got {self.g_R!r}")
        if not self.t1_res > 0:
            raise ValueError(f"t1_res must be positive, got {self.t1_res!r}")

    @property
    def r(self) -> float:
        """Coupling ratio g_R / omega_rR."""
        if self.omega_rR == 0:
            raise ZeroDivisionError("r is undefined for omega_rR = 0")
        return self.g_R / self.omega_rR

    @property
    def kappa(self) -> float:
        """Photon decay rate 1/t1_res in 1/us (0 without decay)."""
        return 0.0 if math.isinf(self.t1_res) else 1.0 / self.t1_res

    @classmethod
    def from_ratio(cls, g_R: float, r: float, **kw) -> "RabiParams":
        return cls(g_R=g_R, omega_rR=g_R / r, **kw)


def _kerr_term(kerr: float, space: SpaceSpec) -> np.ndarray:
    a = annihilation(space)
    ad = a.conj().T
    return embed(None, 0.5 * TWO_PI * kerr * ad @ ad @ a @ a, space)


def build_rabi(p: RabiParams, space: SpaceSpec) -> np.ndarray:
    """``-(w_q/2) sz + w_r a^dag a + g (a + a^dag)(s+ + s-) + (K/2) a^dag a^dag a a``."""
    a = annihilation(space)
    sx = pauli("x")
    h = (
        -0.5 * TWO_PI * p.omega_qR * embed(pauli("z"), None, space)
        + TWO_PI * p.omega_rR * embed(None, number(space), space)
        + TWO_PI * p.g_R * embed(sx, a + a.conj().T, space)
    )
    if p.kerr:
        h = h + _kerr_term(p.kerr, space)
    return h


def build_jc(g: float, delta_r: float, delta_q_jc: float, space: SpaceSpec) -> np.ndarray:
    """``-(d_q/2) sz + d_r a^dag a + g (a s+ + a^dag s-)``."""
    a = annihilation(space)
    return TWO_PI * (
        -0.5 * delta_q_jc * embed(pauli("z"), None, space)
        + delta_r * embed(None, number(space), space)
        + g * (embed(pauli("+"), a, space) + embed(pauli("-"), a.conj().T, space))
    )


def build_ajc(g: float, delta_q_ajc: float, space: SpaceSpec, delta_r: float = 0.0) -> np.ndarray:
    """``sx H_jc sx``: counter-rotating terms only."""
    sx = embed(pauli("x"), None, space)
    return sx @ build_jc(g, delta_r, delta_q_ajc, space) @ sx


def excitation_number(space: SpaceSpec) -> np.ndarray:
    """``a^dag a + s+ s-``, conserved by the JC Hamiltonian."""
    return embed(None, number(space), space) + embed(pauli("+") @ pauli("-"), None, space)


def ajc_charge(space: SpaceSpec) -> np.ndarray:
    """``a^dag a - s+ s-``, conserved by the AJC Hamiltonian."""
    return embed(None, number(space), space) - embed(pauli("+") @ pauli("-"), None, space)


def total_parity(space: SpaceSpec) -> np.ndarray:
    """``sz (x) Pi``, conserved by the Rabi Hamiltonian."""
    from .hilbert import parity_operator

    return embed(pauli("z"), parity_operator(space), space)


@dataclass(frozen=True)
class DegenerateSolution:
    alpha_plus: np.ndarray
    alpha_minus: np.ndarray
    qubit_parity: np.ndarray
    photon_parity: np.ndarray
    mean_n: np.ndarray


def degenerate_oracle(p: RabiParams, t) -> DegenerateSolution:
    """Closed-form degenerate-qubit Rabi dynamics from ``|1, 0>``.

    In the ``sx = +-1`` sectors the field is a driven oscillator, so each
    branch stays coherent with amplitude ``alpha_pm(t) = -+ r (1 - exp(-i w t))``
    (``w = 2 pi omega_rR``). The sign matches the ``sx = +1`` conditional
    state of :func:`build_rabi` evolved with ``exp(-iHt)``.
    """
    if p.omega_qR != 0 or p.kerr != 0 or p.kappa != 0:
        raise ValueError("degenerate oracle requires omega_qR = 0, kerr = 0 and no decay")
    t = np.asarray(t, dtype=float)
    if p.omega_rR == 0:
        alpha = -1j * TWO_PI * p.g_R * t
    else:
        w = TWO_PI * p.omega_rR
        alpha = -p.r * (1 - np.exp(-1j * w * t))
    overlap = np.exp(-2 * np.abs(alpha) ** 2)
    par = 0.5 * (1 + overlap)
    return DegenerateSolution(
        alpha_plus=alpha,
        alpha_minus=-alpha,
        qubit_parity=par,
        photon_parity=par.copy(),
        mean_n=np.abs(alpha) ** 2,
    )


def revival_time(omega_rR: float) -> float:
    """First revival of the degenerate dynamics: one simulated resonator period (us)."""
    return 1.0 / abs(omega_rR)


def jc_reference_period(g: float, delta_qr: float) -> float:
    """JC exchange period ``1/sqrt(4 g^2 + d^2)`` in us for cyclic MHz inputs."""
    if not g > 0:
        raise ValueError("g must be positive")
    return 1.0 / math.sqrt(4 * g * g + delta_qr * delta_qr)
