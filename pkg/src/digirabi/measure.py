"""Observables and emulated meters.

Normalised parities follow ``(1 + <.>)/2`` so that they live in ``[0, 1]``.
The qubit parity reads 1 for the excited state ``|1>`` (the usual initial
state) and 0.5 for a maximally mixed qubit; this normalisation is a
convention and is stamped into exported metadata as ``QUBIT_PARITY_CONVENTION``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hilbert import QuantumState, SpaceSpec, displacement

__all__ = [
    "QUBIT_PARITY_CONVENTION",
    "PhotonMeterSpec",
    "reduced_resonator",
    "reduced_qubit",
    "photon_distribution",
    "sz_expectation",
    "qubit_parity",
    "photon_parity",
    "parity_expectation",
    "mean_photon",
    "ramsey_meter_response",
    "invert_meter",
    "sample_probability",
    "wigner_point",
    "wigner_grid",
    "von_neumann_entropy",
    "qubit_entropy",
    "conditional_resonator",
]

QUBIT_PARITY_CONVENTION = "(1 - <sz>)/2, excited |1> reads 1"


# ---------------------------------------------------------------------------
# reduced states
# ---------------------------------------------------------------------------


def _blocks(state: QuantumState) -> np.ndarray:
    if state.subsystem != "joint":
        raise ValueError("joint qubit-resonator state required")
    d = state.space.dim_res
    if state.is_pure:
        return state.data.reshape(2, d)
    return state.data.reshape(2, d, 2, d)


def reduced_resonator(state: QuantumState) -> np.ndarray:
    """Resonator density matrix (dimension ``n_max + 1``)."""
    if state.subsystem == "resonator":
        return state.density_matrix()
    b = _blocks(state)
    if state.is_pure:
        return b.T @ b.conj()
    return np.einsum("iaib->ab", b)


def reduced_qubit(state: QuantumState) -> np.ndarray:
    """2x2 qubit density matrix."""
    b = _blocks(state)
    if state.is_pure:
        return b @ b.conj().T
    return np.einsum("iaja->ij", b)


def photon_distribution(state: QuantumState) -> np.ndarray:
    """Photon-number probabilities ``P_n``."""
    if state.subsystem == "resonator" and state.is_pure:
        return np.abs(state.data) ** 2
    if state.is_pure:
        return np.sum(np.abs(_blocks(state)) ** 2, axis=0)
    return np.clip(np.diagonal(reduced_resonator(state)).real, 0.0, None)


def sz_expectation(state: QuantumState) -> float:
    q = reduced_qubit(state)
    return float((q[0, 0] - q[1, 1]).real)


def qubit_parity(state: QuantumState) -> float:
    """Normalised qubit parity ``(1 - <sz>)/2``: ``|1>`` gives 1, ``|0>`` gives 0."""
    return 0.5 * (1.0 - sz_expectation(state))


def parity_expectation(state: QuantumState) -> float:
    """Raw photon parity ``<Pi>`` in ``[-1, 1]``."""
    p = photon_distribution(state)
    return float(np.sum(p[0::2]) - np.sum(p[1::2]))


def photon_parity(state: QuantumState) -> float:
    """Normalised photon parity ``(1 + <Pi>)/2``."""
    return 0.5 * (1.0 + parity_expectation(state))


def mean_photon(state: QuantumState) -> float:
    p = photon_distribution(state)
    return float(np.dot(np.arange(len(p)), p))


# ---------------------------------------------------------------------------
# photon meters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhotonMeterSpec:
    """Ramsey-type photon meter.

    ``tau_eff`` is the Ramsey separation (us), ``chi2`` the signed dispersive
    shift ``2 chi`` (MHz, cyclic) and ``d`` the photon number at which the
    accrued phase is refocused. Photon ``j`` rotates the probe by
    ``theta_j = (j - d) 2 pi chi2 tau_eff``.

    ``mode="ramsey"`` reads ``sum_j P_j (1 + sin theta_j)/2``; ``mode="parity"``
    reads ``sum_j P_j (1 + cos theta_j)/2`` and requires
    ``|chi2| tau_eff = 1/2`` so that it measures the photon parity.
    """

    tau_eff: float
    chi2: float
    d: float = 0.0
    mode: str = "ramsey"

    def __post_init__(self):
        if not self.tau_eff > 0:
            raise ValueError("tau_eff must be positive")
        if self.chi2 == 0:
            raise ValueError("chi2 must be non-zero")
        if self.mode not in ("ramsey", "parity"):
            raise ValueError(f"unknown meter mode {self.mode!r}")
        if self.mode == "parity" and abs(abs(self.chi2) * self.tau_eff - 0.5) > 1e-6:
            raise ValueError("parity mode needs |chi2| * tau_eff = 1/2")

    @classmethod
    def parity(cls, chi2: float) -> "PhotonMeterSpec":
        """Parity meter: Ramsey separation ``1/(2|chi2|)``, i.e. ``pi/|2 chi|`` angular."""
        return cls(tau_eff=1.0 / (2 * abs(chi2)), chi2=chi2, d=0.0, mode="parity")

    @property
    def slope(self) -> float:
        """Probe rotation per photon (rad)."""
        return 2 * math.pi * self.chi2 * self.tau_eff

    def linear_window(self, max_angle: float = math.pi / 6) -> tuple[float, float]:
        """Photon numbers whose rotation stays within ``max_angle`` (default 30 degrees)."""
        w = max_angle / abs(self.slope)
        return (self.d - w, self.d + w)

    def theta(self, n_max: int) -> np.ndarray:
        return (np.arange(n_max + 1) - self.d) * self.slope


def ramsey_meter_response(state: QuantumState | np.ndarray, spec: PhotonMeterSpec,
                          shots: int | None = None, rng: np.random.Generator | None = None) -> float:
    """Excited-state probability of the meter qubit.

    ``state`` may also be a photon-number distribution. The exact sine (or
    cosine) sum is used, not its linearisation. With ``shots`` the result
    is a binomial estimate drawn from ``rng``.
    """
    p_n = np.asarray(state, dtype=float) if isinstance(state, np.ndarray) else photon_distribution(state)
    th = spec.theta(len(p_n) - 1)
    resp = np.sin(th) if spec.mode == "ramsey" else np.cos(th)
    p = float(np.clip(0.5 * np.dot(p_n, 1 + resp), 0.0, 1.0))
    if shots is not None:
        p = sample_probability(p, shots, rng)
    return p


def sample_probability(p: float, shots: int, rng: np.random.Generator | None = None) -> float:
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = rng if rng is not None else np.random.default_rng()
    return float(rng.binomial(shots, p) / shots)


def invert_meter(p, spec: PhotonMeterSpec):
    """Linearised inversion ``n = d + (2p - 1)/(2 pi chi2 tau_eff)``.

    Valid inside :meth:`PhotonMeterSpec.linear_window`; outside it the sine
    response wraps and the estimate is biased towards ``d``.
    """
    if spec.mode != "ramsey":
        raise ValueError("only Ramsey-mode meters are invertible to a photon number")
    return spec.d + (2 * np.asarray(p, dtype=float) - 1) / spec.slope


# ---------------------------------------------------------------------------
# Wigner function
# ---------------------------------------------------------------------------


def _pad_dim(n_max: int, amp: float) -> int:
    s = math.sqrt(n_max) + amp
    return max(n_max, int(math.ceil(s * s + 8 * s)) + 10) + 1


def wigner_point(state: QuantumState | np.ndarray, alpha: complex) -> float:
    """``W(alpha) = (2/pi) tr[Pi D^dag(alpha) rho D(alpha)]`` of the resonator.

    The displacement is built in a space padded beyond the state's
    truncation so that the truncated exponential is exact on the state's
    support.
    """
    rho = state if isinstance(state, np.ndarray) else reduced_resonator(state)
    return float(_wigner_displaced(rho, np.array([alpha], dtype=complex))[0])


def wigner_grid(state: QuantumState | np.ndarray, alphas) -> np.ndarray:
    """Wigner function at each complex point of ``alphas`` (any shape).

    Evaluates the same displaced-parity expectation as :func:`wigner_point`
    through the closed-form Fock-basis Wigner functions, built with the
    stable three-term Laguerre recursion over matrix elements. Cost is
    ``O(d^2)`` array operations for the whole grid.
    """
    rho = state if isinstance(state, np.ndarray) else reduced_resonator(state)
    a = np.asarray(alphas, dtype=complex)
    d = rho.shape[0]
    wl = [np.exp(-2.0 * np.abs(a) ** 2) / math.pi]
    w = rho[0, 0].real * wl[0].real
    for n in range(1, d):
        wl.append(2.0 * a * wl[n - 1] / math.sqrt(n))
        w = w + 2 * np.real(rho[0, n] * wl[n])
    for m in range(1, d):
        temp = wl[m].copy()
        wl[m] = (2 * np.conj(a) * temp - math.sqrt(m) * wl[m - 1]) / math.sqrt(m)
        w = w + np.real(rho[m, m] * wl[m])
        for n in range(m + 1, d):
            temp2 = (2 * a * wl[n - 1] - math.sqrt(m) * temp) / math.sqrt(n)
            temp = wl[n].copy()
            wl[n] = temp2
            w = w + 2 * np.real(rho[m, n] * wl[n])
    return 2.0 * w


def _wigner_displaced(rho: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    d = rho.shape[0]
    amp = float(np.max(np.abs(alphas), initial=0.0))
    dim = _pad_dim(d - 1, amp)
    par = (-1.0) ** np.arange(dim)
    sp = SpaceSpec(dim - 1)
    out = np.empty(alphas.shape)
    for idx, a in np.ndenumerate(alphas):
        dm = displacement(a, sp)
        # diagonal of D^dag rho D, summed with alternating sign
        m = dm.conj().T[:, :d] @ rho @ dm[:d, :]
        out[idx] = (2 / math.pi) * float(np.dot(par, np.diagonal(m).real))
    return out


# ---------------------------------------------------------------------------
# entropy and conditioning
# ---------------------------------------------------------------------------


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy in bits."""
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))


def qubit_entropy(state: QuantumState) -> float:
    return von_neumann_entropy(reduced_qubit(state))


_OUTCOMES = {
    0: np.array([1, 0], dtype=complex),
    1: np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / math.sqrt(2),
    "-": np.array([1, -1], dtype=complex) / math.sqrt(2),
}


def conditional_resonator(state: QuantumState, outcome) -> tuple[np.ndarray, float]:
    """Resonator state after a projective qubit measurement, with its probability.

    ``outcome`` is 0 or 1 (``sz`` basis) or ``'+'``/``'-'`` (``sx`` basis).
    """
    try:
        v = _OUTCOMES[outcome]
    except (KeyError, TypeError):
        raise ValueError(f"unknown qubit outcome {outcome!r}") from None
    b = _blocks(state)
    if state.is_pure:
        phi = v.conj() @ b
        prob = float(np.vdot(phi, phi).real)
        rho = np.outer(phi, phi.conj())
    else:
        rho = np.einsum("i,iajb,j->ab", v.conj(), b, v)
        prob = float(np.trace(rho).real)
    if prob <= 1e-12:
        raise ValueError(f"outcome {outcome!r} has probability {prob:.3g}")
    return rho / prob, prob
