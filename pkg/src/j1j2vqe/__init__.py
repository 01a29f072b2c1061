"""Statevector VQE toolkit for the 2D J1-J2 Heisenberg model.

Builds rectangular J1-J2 lattices, their Pauli-sum Hamiltonians and a
layered hardware-efficient ansatz (optionally without gates on the
diagonal interactions), simulates the circuits exactly, optimizes the
energy with COBYLA and basin hopping, and compares against exact
ground/first-excited energies. Post-processing covers spin-spin
correlations and power-law resource extrapolation.
"""

from .analysis import (
    Axis,
    CorrelationMatrix,
    PowerLawFit,
    ScanPoint,
    correlation_matrix,
    extrapolate,
    min_resources_scan,
    power_law_fit,
)
from .ansatz import (
    AnsatzSpec,
    ResourceCount,
    ansatz_resources,
    build_ansatz,
    count_resources,
    entangling_edges,
    extend_ansatz,
)
from .lattice import Boundary, Lattice, build_lattice
from .optimizer import (
    HopConfig,
    LocalConfig,
    LocalResult,
    OptStatus,
    basin_hopping,
    cobyla_minimize,
)
from .pauli import (
    ObservableSum,
    PauliString,
    build_hamiltonian,
    expectation,
    heisenberg_bond,
    observable_sum,
)
from .simulator import (
    GateKind,
    GateOp,
    ParamCircuit,
    StateVector,
    apply_single,
    apply_two,
    gate_matrix,
    init_zero_state,
    run_circuit,
)
from .spectrum import (
    NonConvergenceError,
    SpectrumMethod,
    SpectrumResult,
    gap_metric,
    lowest_two,
)
from .vqe import TwoStageConfig, VqeConfig, VqeRunRecord, two_stage_run, vqe_run

__version__ = "0.1.0"

__all__ = [
    "AnsatzSpec",
    "Axis",
    "Boundary",
    "CorrelationMatrix",
    "GateKind",
    "GateOp",
    "HopConfig",
    "Lattice",
    "LocalConfig",
    "LocalResult",
    "NonConvergenceError",
    "ObservableSum",
    "OptStatus",
    "ParamCircuit",
    "PauliString",
    "PowerLawFit",
    "ResourceCount",
    "ScanPoint",
    "SpectrumMethod",
    "SpectrumResult",
    "StateVector",
    "TwoStageConfig",
    "VqeConfig",
    "VqeRunRecord",
    "ansatz_resources",
    "apply_single",
    "apply_two",
    "basin_hopping",
    "build_ansatz",
    "build_hamiltonian",
    "build_lattice",
    "cobyla_minimize",
    "correlation_matrix",
    "count_resources",
    "entangling_edges",
    "expectation",
    "extend_ansatz",
    "extrapolate",
    "gap_metric",
    "gate_matrix",
    "heisenberg_bond",
    "init_zero_state",
    "lowest_two",
    "min_resources_scan",
    "observable_sum",
    "power_law_fit",
    "run_circuit",
    "two_stage_run",
    "vqe_run",
]
