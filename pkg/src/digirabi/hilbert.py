"""Truncated Fock-space and qubit algebra on the qubit (x) resonator space.

Conventions used throughout the package:

* the qubit factor comes first in every Kronecker product;
* ``|0>`` is the qubit ground state and ``|1>`` the excited state;
* ``sigma_z |0> = +|0>``, so ``-(w/2) sigma_z`` lifts the excited state;
* ``sigma_+ = |1><0|`` raises the qubit excitation.

Operators are plain complex ``numpy`` arrays. States are wrapped in
:class:`QuantumState` so that the joint/resonator distinction and the
normalisation invariants travel with the data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

__all__ = [
    "SpaceSpec",
    "QuantumState",
    "TruncationError",
    "annihilation",
    "number",
    "pauli",
    "embed",
    "identity",
    "coherent_state",
    "fock_state",
    "displacement",
    "parity_operator",
    "basis_state",
    "bell_cat",
    "product_state",
    "expm_hermitian",
    "min_n_max",
    "is_hermitian",
]

PURE_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-8


class TruncationError(ValueError):
    """A state does not fit in the chosen photon-number truncation."""


@dataclass(frozen=True)
class SpaceSpec:
    """Photon-number truncation of the qubit (x) resonator space."""

    n_max: int

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max!r}")

    @property
    def dim_res(self) -> int:
        return self.n_max + 1

    @property
    def dim_total(self) -> int:
        return 2 * self.dim_res


def min_n_max(alpha_max: float, margin: int = 10) -> int:
    """Smallest truncation that holds a coherent state of amplitude ``alpha_max``.

    Uses ``max(4|a|^2, |a|^2 + 6|a|) + margin``: the quadratic term is the
    conventional guard for small amplitudes and the Poisson-tail term keeps
    the lost weight below 1e-6 for any amplitude.
    """
    a = abs(alpha_max)
    return int(math.ceil(max(4 * a * a, a * a + 6 * a))) + margin


def is_hermitian(op: np.ndarray, rtol: float = 1e-12) -> bool:
    scale = max(1.0, float(np.linalg.norm(op)))
    return bool(np.max(np.abs(op - op.conj().T), initial=0.0) <= rtol * scale)


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


def annihilation(space: SpaceSpec) -> np.ndarray:
    n = np.arange(1, space.dim_res)
    return np.diag(np.sqrt(n).astype(complex), k=1)


def number(space: SpaceSpec) -> np.ndarray:
    return np.diag(np.arange(space.dim_res, dtype=complex))


_PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "+": np.array([[0, 0], [1, 0]], dtype=complex),
    "-": np.array([[0, 1], [0, 0]], dtype=complex),
}


def pauli(which: str) -> np.ndarray:
    """Qubit matrix for ``which`` in ``{i, x, y, z, +, -}``.

    ``+``/``-`` are the excitation raising/lowering operators, so that
    ``x = (+) + (-)`` and ``(+)(-)`` projects on the excited state.
    """
    try:
        return _PAULI[which.lower()].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli label {which!r}") from None


def identity(space: SpaceSpec, resonator_only: bool = False) -> np.ndarray:
    return np.eye(space.dim_res if resonator_only else space.dim_total, dtype=complex)


def embed(op_qubit: np.ndarray | None, op_res: np.ndarray | None, space: SpaceSpec) -> np.ndarray:
    """Kronecker product on the joint space, qubit factor first.

    ``None`` stands for the identity on that factor.
    """
    q = np.eye(2, dtype=complex) if op_qubit is None else np.asarray(op_qubit, dtype=complex)
    r = np.eye(space.dim_res, dtype=complex) if op_res is None else np.asarray(op_res, dtype=complex)
    if q.shape != (2, 2):
        raise ValueError(f"qubit operand must be 2x2, got {q.shape}")
    if r.shape != (space.dim_res, space.dim_res):
        raise ValueError(f"resonator operand must be {space.dim_res}x{space.dim_res}, got {r.shape}")
    return np.kron(q, r)


def parity_operator(space: SpaceSpec) -> np.ndarray:
    return np.diag((-1.0) ** np.arange(space.dim_res)).astype(complex)


def expm_hermitian(h: np.ndarray, t: float = 1.0) -> np.ndarray:
    """``exp(-i h t)`` for Hermitian ``h`` via eigendecomposition."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def displacement(alpha: complex, space: SpaceSpec) -> np.ndarray:
    """``D(alpha) = exp(alpha a^dag - alpha^* a)`` on the truncated resonator."""
    if alpha == 0:
        return identity(space, resonator_only=True)
    a = annihilation(space)
    gen = alpha * a.conj().T - np.conj(alpha) * a
    # gen is anti-Hermitian: i*gen is Hermitian and exp(gen) = exp(-i (i gen))
    return expm_hermitian(1j * gen)


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Pure vector or density matrix on the joint or resonator-only space.

    ``subsystem`` is ``"joint"`` (dimension ``2 (n_max+1)``) or
    ``"resonator"`` (dimension ``n_max+1``).
    """

    space: SpaceSpec
    data: np.ndarray
    subsystem: str = "joint"
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        object.__setattr__(self, "data", data)
        if self.subsystem not in ("joint", "resonator"):
            raise ValueError(f"unknown subsystem {self.subsystem!r}")
        dim = self.dim
        if data.ndim == 1:
            if data.shape != (dim,):
                raise ValueError(f"state vector must have length {dim}, got {data.shape}")
            if self.check and abs(np.linalg.norm(data) - 1.0) > PURE_TOL:
                raise ValueError(f"pure state not normalised: |psi| = {np.linalg.norm(data)!r}")
        elif data.ndim == 2:
            if data.shape != (dim, dim):
                raise ValueError(f"density matrix must be {dim}x{dim}, got {data.shape}")
            if self.check:
                if not is_hermitian(data, 1e-10):
                    raise ValueError("density matrix is not Hermitian")
                tr = np.trace(data).real
                if abs(tr - 1.0) > TRACE_TOL:
                    raise ValueError(f"density matrix trace {tr!r} != 1")
                lo = np.linalg.eigvalsh(data).min()
                if lo < -PSD_TOL:
                    raise ValueError(f"density matrix has negative eigenvalue {lo!r}")
        else:
            raise ValueError("state data must be a vector or a square matrix")

    @property
    def dim(self) -> int:
        return self.space.dim_total if self.subsystem == "joint" else self.space.dim_res

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    def density_matrix(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data

    def expect(self, op: np.ndarray) -> complex:
        if self.is_pure:
            return complex(np.vdot(self.data, op @ self.data))
        return complex(np.einsum("ij,ji->", op, self.data))

    def as_dm(self) -> "QuantumState":
        if not self.is_pure:
            return self
        return QuantumState(self.space, self.density_matrix(), self.subsystem, check=False)


def fock_state(n: int, space: SpaceSpec) -> QuantumState:
    if not 0 <= n <= space.n_max:
        raise TruncationError(f"Fock state |{n}> outside truncation n_max={space.n_max}")
    v = np.zeros(space.dim_res, dtype=complex)
    v[n] = 1.0
    return QuantumState(space, v, "resonator")


def coherent_state(alpha: complex, space: SpaceSpec) -> QuantumState:
    """Truncated coherent state ``|alpha>``, renormalised after truncation.

    Raises:
        TruncationError: the truncated amplitudes carry less than 1 - 1e-6
            of the norm.
    """
    n = np.arange(space.dim_res)
    log_fact = np.array([math.lgamma(k + 1) for k in n])
    mag = abs(alpha)
    if mag == 0:
        c = np.zeros(space.dim_res, dtype=complex)
        c[0] = 1.0
    else:
        logamp = -0.5 * mag**2 + n * math.log(mag) - 0.5 * log_fact
        c = np.exp(logamp) * np.exp(1j * n * np.angle(alpha))
    norm = np.linalg.norm(c)
    if norm < 1 - 1e-6:
        raise TruncationError(
            f"coherent state alpha={alpha} loses {1 - norm:.2e} of its norm at n_max={space.n_max}"
        )
    return QuantumState(space, c / norm, "resonator")


def basis_state(qubit: int | str, photons: int, space: SpaceSpec) -> QuantumState:
    """Product state ``|q, n>``; ``qubit`` is 0, 1, ``'+'`` or ``'-'``."""
    q = {
        0: np.array([1, 0], dtype=complex),
        1: np.array([0, 1], dtype=complex),
        "+": np.array([1, 1], dtype=complex) / math.sqrt(2),
        "-": np.array([1, -1], dtype=complex) / math.sqrt(2),
    }[qubit]
    return QuantumState(space, np.kron(q, fock_state(photons, space).data))


def product_state(qubit: np.ndarray, res: QuantumState) -> QuantumState:
    q = np.asarray(qubit, dtype=complex)
    q = q / np.linalg.norm(q)
    return QuantumState(res.space, np.kron(q, res.data))


def bell_cat(alpha: complex, space: SpaceSpec) -> QuantumState:
    """``(|+, alpha> - |-, -alpha>)/sqrt(2)``, the state reached from ``|1,0>``."""
    plus = np.array([1, 1], dtype=complex) / math.sqrt(2)
    minus = np.array([1, -1], dtype=complex) / math.sqrt(2)
    v = np.kron(plus, coherent_state(alpha, space).data) - np.kron(minus, coherent_state(-alpha, space).data)
    return QuantumState(space, v / np.linalg.norm(v))
