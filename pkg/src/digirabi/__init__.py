"""Digital simulation of the quantum Rabi model by phase-controlled Trotterisation."""

from .hilbert import QuantumState, SpaceSpec, min_n_max
from .models import RabiParams, build_ajc, build_jc, build_rabi, degenerate_oracle
from .trotter import TrotterPlan, effective_hamiltonian

__version__ = "0.1.0"

__all__ = [
    "QuantumState",
    "SpaceSpec",
    "min_n_max",
    "RabiParams",
    "build_rabi",
    "build_jc",
    "build_ajc",
    "degenerate_oracle",
    "TrotterPlan",
    "effective_hamiltonian",
    "__version__",
]
