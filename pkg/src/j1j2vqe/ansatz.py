"""Layered variational circuit for the J1-J2 lattice.

Circuit structure: one parametrized X gate and one parametrized Y gate per
qubit (each with its own parameter), followed by repeated layer blocks.
Each block is a Z gate per qubit (own parameter each) and then, per
entangling edge, an XX/YY/ZZ triple sharing a single parameter. NN edges
come first in lattice order; diagonal (NNN) edges follow, and can be left
out entirely, which removes the need for any gates between non-adjacent
qubits on grid hardware.

Closed-form resource counts with n qubits, L layers and E entangling edges:

    n_params                 = 2n + L * (n + E)
    two_qubit_gates          = 3 * L * E
    single_qubit_gates_total = 2n + L * n
    single_qubit_gates_excl_z = 2n
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .lattice import Edge, Lattice
from .simulator import GateKind, GateOp, ParamCircuit

DEFAULT_EPSILON = 1e-5


@dataclass(frozen=True)
class AnsatzSpec:
    lattice: Lattice
    n_layers: int
    include_diagonals: bool = True

    def __post_init__(self) -> None:
        if self.n_layers < 0:
            raise ValueError(f"n_layers must be >= 0, got {self.n_layers}")


@dataclass(frozen=True)
class ResourceCount:
    two_qubit_gates: int
    single_qubit_gates_total: int
    single_qubit_gates_excl_z: int
    n_params: int
    n_layers: int


def entangling_edges(spec: AnsatzSpec) -> tuple[Edge, ...]:
    """Edges that receive XX/YY/ZZ triples, in gate order."""
    if spec.include_diagonals:
        return spec.lattice.nn_edges + spec.lattice.nnn_edges
    return spec.lattice.nn_edges


def build_ansatz(spec: AnsatzSpec) -> ParamCircuit:
    """Build the layered circuit; parameters are indexed in gate order."""
    n = spec.lattice.n_sites
    edges = entangling_edges(spec)
    gates: list[GateOp] = []
    p = 0
    for q in range(n):
        gates.append(GateOp(GateKind.X, (q,), p))
        p += 1
        gates.append(GateOp(GateKind.Y, (q,), p))
        p += 1
    for _ in range(spec.n_layers):
        for q in range(n):
            gates.append(GateOp(GateKind.Z, (q,), p))
            p += 1
        for i, j in edges:
            for kind in (GateKind.XX, GateKind.YY, GateKind.ZZ):
                gates.append(GateOp(kind, (i, j), p))
            p += 1
    return ParamCircuit(n_qubits=n, gates=tuple(gates), n_params=p)


def count_resources(circ: ParamCircuit) -> ResourceCount:
    """Count gates and parameters by direct traversal of an ansatz circuit.

    Single-qubit Z gates are excluded from single_qubit_gates_excl_z since
    they can be realized virtually at no hardware cost.
    """
    two_qubit = 0
    single_total = 0
    excl_z = 0
    z_count = 0
    for g in circ.gates:
        if g.kind.arity == 2:
            two_qubit += 1
        else:
            single_total += 1
            if g.kind is GateKind.Z:
                z_count += 1
            else:
                excl_z += 1
    n_layers, rem = divmod(z_count, circ.n_qubits)
    if rem != 0:
        raise ValueError("circuit does not have the layered ansatz structure")
    return ResourceCount(
        two_qubit_gates=two_qubit,
        single_qubit_gates_total=single_total,
        single_qubit_gates_excl_z=excl_z,
        n_params=circ.n_params,
        n_layers=n_layers,
    )


def ansatz_resources(spec: AnsatzSpec) -> ResourceCount:
    """Closed-form resource counts without materializing the circuit."""
    n = spec.lattice.n_sites
    e = len(entangling_edges(spec))
    layers = spec.n_layers
    return ResourceCount(
        two_qubit_gates=3 * layers * e,
        single_qubit_gates_total=2 * n + layers * n,
        single_qubit_gates_excl_z=2 * n,
        n_params=2 * n + layers * (n + e),
        n_layers=layers,
    )


def extend_ansatz(
    spec: AnsatzSpec,
    old_params: np.ndarray,
    extra_layers: int,
    epsilon: float = DEFAULT_EPSILON,
) -> tuple[ParamCircuit, np.ndarray]:
    """Deepen a trained circuit, warm-starting the new gates near identity.

    Returns the circuit for spec with extra_layers more layer blocks and a
    parameter vector that inherits old_params on the original gate slots
    and sets every new slot to epsilon. Exactly zero is avoided on purpose:
    it tends to pin the optimizer at a fixed point, while a tiny epsilon
    leaves the energy unchanged to first order.
    """
    if extra_layers < 0:
        raise ValueError(f"extra_layers must be >= 0, got {extra_layers}")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    old_params = np.asarray(old_params, dtype=np.float64)
    n_old = ansatz_resources(spec).n_params
    if old_params.shape != (n_old,):
        raise ValueError(
            f"parameter vector has shape {old_params.shape}, expected ({n_old},)"
        )
    new_spec = replace(spec, n_layers=spec.n_layers + extra_layers)
    circ = build_ansatz(new_spec)
    # the old circuit's gate list is a prefix of the new one, so parameter
    # slots carry over positionally
    new_params = np.full(circ.n_params, float(epsilon))
    new_params[:n_old] = old_params
    return circ, new_params
