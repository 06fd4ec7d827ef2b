"""Time evolution: exact unitary, Trotterised, and Lindblad with photon decay."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np
import scipy.sparse as sps
from scipy.sparse.linalg import expm_multiply

from .hilbert import QuantumState, SpaceSpec, annihilation, embed, is_hermitian
from .trotter import JCBlocks, TrotterPlan, bit_flip, frame_unitary, phase_schedule

logger = logging.getLogger(__name__)

__all__ = [
    "Trajectory",
    "Gate",
    "NumericalError",
    "evolve_unitary",
    "evolve_trotter",
    "evolve_lindblad",
    "trotter_segments",
    "LINDBLAD_DIM_BUDGET",
]

#: largest joint dimension handled by the sparse Liouvillian exponential;
#: larger spaces fall back to fixed-step RK4 on the master equation
LINDBLAD_DIM_BUDGET = 128


class NumericalError(RuntimeError):
    """Raised when an integrator breaks a conservation check."""


@dataclass
class Trajectory:
    """Sampled states with the parameters that produced them."""

    times: np.ndarray
    states: list[QuantumState]
    params: Any = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.states):
            raise ValueError("times and states differ in length")
        if np.any(np.diff(self.times) < 0):
            raise ValueError("trajectory times must be non-decreasing")

    def __len__(self) -> int:
        return len(self.states)

    def map(self, fn) -> np.ndarray:
        """Apply an observable function to every state."""
        return np.array([fn(s) for s in self.states])


@dataclass(frozen=True)
class Gate:
    """Instantaneous unitary inside a segment list."""

    unitary: np.ndarray


def _times(times: Iterable[float]) -> np.ndarray:
    t = np.asarray(list(times) if not isinstance(times, np.ndarray) else times, dtype=float)
    if t.ndim != 1:
        raise ValueError("times must be one-dimensional")
    if len(t) and (t[0] < 0 or np.any(np.diff(t) < 0)):
        raise ValueError("times must be sorted and start at t >= 0")
    return t


def evolve_unitary(H: np.ndarray, psi0: QuantumState, times, params: Any = None) -> Trajectory:
    """``exp(-iHt) psi0`` at each sample time, via one eigendecomposition."""
    if not is_hermitian(H, 1e-10):
        raise ValueError("Hamiltonian is not Hermitian")
    t = _times(times)
    w, v = np.linalg.eigh(H)
    vd = v.conj().T
    states = []
    if psi0.is_pure:
        c = vd @ psi0.data
        for ti in t:
            states.append(QuantumState(psi0.space, v @ (np.exp(-1j * w * ti) * c), psi0.subsystem, check=False))
    else:
        r = vd @ psi0.data @ v
        for ti in t:
            ph = np.exp(-1j * w * ti)
            states.append(QuantumState(psi0.space, v @ (ph[:, None] * r * ph.conj()[None, :]) @ vd,
                                       psi0.subsystem, check=False))
    return Trajectory(t, states, params)


def _qubit_apply(q: np.ndarray, x: np.ndarray, dim_res: int) -> np.ndarray:
    """Apply a 2x2 qubit operator to a joint vector (or to the rows of a matrix)."""
    if x.ndim == 1:
        return (q @ x.reshape(2, dim_res)).reshape(-1)
    return (q @ x.reshape(2, dim_res, -1).reshape(2, -1)).reshape(x.shape)


class _TrotterKernel:
    """Cached propagators for one plan on one space."""

    def __init__(self, plan: TrotterPlan, space: SpaceSpec):
        self.plan = plan
        self.space = space
        self.u_full = JCBlocks(plan.g, plan.delta_q_jc, plan.tau, space).apply
        self.u_res = JCBlocks(plan.g, 0.0, plan.tau, space).apply
        self.u_half = JCBlocks(plan.g, plan.delta_q_jc, plan.tau / 2, space).apply
        self.phases = phase_schedule(plan)

    def _ajc(self, k: int, psi: np.ndarray) -> np.ndarray:
        d = self.space.dim_res
        phi1, phi2 = self.phases[k - 1]
        psi = _qubit_apply(bit_flip(phi1), psi, d)
        psi = self.u_res(psi)
        return -_qubit_apply(bit_flip(phi2), psi, d)

    def step(self, k: int, psi: np.ndarray) -> np.ndarray:
        """Apply step ``k`` (1-based) to a vector or to the columns of a matrix."""
        if self.plan.order == 2:
            return self.u_half(self._ajc(k, self.u_half(psi)))
        return self._ajc(k, self.u_full(psi))

    def run(self, x: np.ndarray, merge: bool):
        """Yield the state after each step.

        With ``merge`` the trailing half JC pulse of step ``k`` and the
        leading half of step ``k + 1`` are applied as one full pulse; the
        sampled state is formed from the unmerged carry.
        """
        if self.plan.order == 1 or not merge:
            for k in range(1, self.plan.n_steps + 1):
                x = self.step(k, x)
                yield x
            return
        for k in range(1, self.plan.n_steps + 1):
            x = self._ajc(k, (self.u_half if k == 1 else self.u_full)(x))
            yield self.u_half(x)


def evolve_trotter(plan: TrotterPlan, psi0: QuantumState, space: SpaceSpec | None = None,
                   rabi_frame: bool = False, merge_halves: bool = True) -> Trajectory:
    """Apply the Trotter sequence, sampling after every step (``n_steps + 1`` samples).

    States are returned in the frame the sequence runs in; photon number,
    photon parity and ``sz`` are the same in the Rabi frame. With
    ``rabi_frame=True`` the frame rotation is undone so that phase-sensitive
    quantities (Wigner functions, conditional cats) line up with
    :func:`evolve_unitary` under the effective Rabi Hamiltonian.
    """
    space = space or psi0.space
    if space != psi0.space:
        raise ValueError("psi0 lives on a different space")
    kern = _TrotterKernel(plan, space)
    states = [psi0]
    if psi0.is_pure:
        for x in kern.run(psi0.data, merge_halves):
            states.append(QuantumState(space, x, psi0.subsystem, check=False))
    else:
        # propagate weighted eigenvectors: rho = sum_i w_i |v_i><v_i|
        w, v = np.linalg.eigh(psi0.data)
        keep = w > 1e-14
        cols = v[:, keep] * np.sqrt(w[keep])
        for x in kern.run(cols, merge_halves):
            states.append(QuantumState(space, x @ x.conj().T, psi0.subsystem, check=False))
    if rabi_frame:
        states = [_unframe(plan, t, s) for t, s in zip(plan.times, states)]
    return Trajectory(plan.times, states, plan, {"engine": "trotter", "order": plan.order})


def _unframe(plan: TrotterPlan, t: float, s: QuantumState) -> QuantumState:
    f = np.diag(frame_unitary(plan, t, s.space)).conj()
    if s.is_pure:
        return QuantumState(s.space, f * s.data, s.subsystem, check=False)
    return QuantumState(s.space, f[:, None] * s.data * f.conj()[None, :], s.subsystem, check=False)


# ---------------------------------------------------------------------------
# Lindblad
# ---------------------------------------------------------------------------


def _liouvillian(H: np.ndarray, a: np.ndarray, kappa: float) -> sps.csr_matrix:
    """Row-major superoperator of ``-i[H, .] + kappa D[a]``."""
    d = H.shape[0]
    eye = sps.identity(d, dtype=complex, format="csr")
    Hs = sps.csr_matrix(H)
    L = -1j * (sps.kron(Hs, eye) - sps.kron(eye, Hs.T))
    if kappa:
        As = sps.csr_matrix(a)
        nn = (As.conj().T @ As).tocsr()
        L = L + kappa * (sps.kron(As, As.conj()) - 0.5 * sps.kron(nn, eye) - 0.5 * sps.kron(eye, nn.T))
    return L.tocsr()


def _rk4_segment(H: np.ndarray, a: np.ndarray, kappa: float, rho: np.ndarray, duration: float,
                 max_step: float) -> np.ndarray:
    Hs = sps.csr_matrix(H)
    As = sps.csr_matrix(a)
    nn = (As.conj().T @ As).tocsr()

    def rhs(r):
        hr = Hs @ r
        out = -1j * (hr - hr.conj().T)
        if kappa:
            ar = As @ r
            nr = nn @ r
            out += kappa * ((As @ ar.conj().T).conj().T - 0.5 * (nr + nr.conj().T))
        return out

    scale = float(abs(sps.linalg.norm(Hs, 1))) + kappa * float(sps.linalg.norm(nn, 1))
    h_cap = 0.2 / max(scale, 1e-12)
    n = max(1, int(math.ceil(duration / min(max_step, h_cap))))
    h = duration / n
    for _ in range(n):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * h * k1)
        k3 = rhs(rho + 0.5 * h * k2)
        k4 = rhs(rho + h * k3)
        rho = rho + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


def trotter_segments(plan: TrotterPlan, space: SpaceSpec) -> list[list]:
    """Per-step segment lists ``[(H, duration) | Gate, ...]`` for a plan.

    The AJC pulse uses the resonant JC Hamiltonian between two bit-flip gates.
    """
    from .models import build_jc

    h_jc = build_jc(plan.g, 0.0, plan.delta_q_jc, space)
    h_res = build_jc(plan.g, 0.0, 0.0, space)
    steps = []
    for phi1, phi2 in phase_schedule(plan):
        g1 = Gate(embed(bit_flip(phi1), None, space))
        g2 = Gate(-embed(bit_flip(phi2), None, space))
        if plan.order == 2:
            steps.append([(h_jc, plan.tau / 2), g1, (h_res, plan.tau), g2, (h_jc, plan.tau / 2)])
        else:
            steps.append([(h_jc, plan.tau), g1, (h_res, plan.tau), g2])
    return steps


def evolve_lindblad(segments: Sequence | TrotterPlan, rho0: QuantumState, t1_res: float,
                    decay_mode: str = "continuous", dim_budget: int = LINDBLAD_DIM_BUDGET,
                    idle_per_step: float = 0.0, rabi_frame: bool = False) -> Trajectory:
    """Master-equation evolution with resonator decay ``kappa = 1/t1_res``.

    ``segments`` is either a :class:`TrotterPlan` (one sample per Trotter
    step) or a list whose items are ``(H, duration)`` pairs or :class:`Gate`
    objects (one sample after every timed segment). Each piecewise-constant
    segment is propagated exactly with the Liouvillian exponential.

    For a plan the returned times are simulated times ``n tau``. The JC and
    AJC pulses of one step last ``2 tau`` in total, so the resonator decays
    over twice the simulated time; ``meta["physical_times"]`` records the
    elapsed decay time. ``rabi_frame`` undoes the frame rotation as in
    :func:`evolve_trotter`.

    ``decay_mode="continuous"`` decays during the coherent segments;
    ``"between"`` runs each segment unitarily and then applies the pure
    decay channel for the same duration. ``idle_per_step`` (us) adds
    decay-only time after every Trotter step, e.g. for gate overheads that
    are not part of the simulated time.
    """
    if not t1_res > 0:
        raise ValueError("t1_res must be positive")
    if decay_mode not in ("continuous", "between"):
        raise ValueError(f"unknown decay_mode {decay_mode!r}")
    space = rho0.space
    kappa = 0.0 if math.isinf(t1_res) else 1.0 / t1_res
    rho = rho0.density_matrix().copy()
    d = rho.shape[0]
    a = embed(None, annihilation(space), space)
    zero = np.zeros_like(a)
    use_expm = d <= dim_budget
    if not use_expm:
        logger.info("dim %d above Lindblad budget %d; using RK4", d, dim_budget)

    if isinstance(segments, TrotterPlan):
        plan = segments
        groups = trotter_segments(plan, space)
        params = plan
    else:
        plan = None
        groups = [[s] for s in segments]
        params = None

    cache: dict[int, sps.csr_matrix] = {}

    def run(h, dur, kap, r):
        if dur == 0:
            return r
        if use_expm:
            key = (id(h), kap)
            if key not in cache:
                cache[key] = (_liouvillian(h, a, kap), h)
            L = cache[key][0]
            return expm_multiply(L * dur, r.reshape(-1)).reshape(d, d)
        return _rk4_segment(h, a, kap, r, dur, dur / 50)

    times = [0.0]
    states = [QuantumState(space, rho.copy(), rho0.subsystem, check=False)]
    t = 0.0
    for group in groups:
        sampled = False
        for seg in group:
            if isinstance(seg, Gate):
                rho = seg.unitary @ rho @ seg.unitary.conj().T
                continue
            h, dur = seg
            if decay_mode == "continuous":
                rho = run(h, dur, kappa, rho)
            else:
                rho = run(h, dur, 0.0, rho)
                rho = run(zero, dur, kappa, rho)
            t += dur
            sampled = True
        if plan is not None and idle_per_step:
            rho = run(zero, idle_per_step, kappa, rho)
        if not sampled and plan is None:
            continue
        tr = np.trace(rho).real
        if abs(tr - 1) > 1e-8:
            raise NumericalError(f"trace drifted to {tr!r} at t={t}")
        rho = 0.5 * (rho + rho.conj().T)
        times.append(t)
        states.append(QuantumState(space, rho.copy(), rho0.subsystem, check=False))
    meta = {"engine": "lindblad", "t1_res": t1_res, "decay_mode": decay_mode,
            "method": "expm" if use_expm else "rk4", "physical_times": np.array(times)}
    if plan is not None:
        # samples are labelled by simulated time; each step spends 2 tau
        # (+ idle) of physical time under decay
        times = plan.times
        if rabi_frame:
            states = [_unframe(plan, t, s) for t, s in zip(times, states)]
    return Trajectory(np.array(times), states, params, meta)
