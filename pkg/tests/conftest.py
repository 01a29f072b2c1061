"""Shared oracles: dense matrix construction independent of the package.

Everything here builds operators the brute-force way (np.kron chains and
eigenprojector fractional powers) so that package kernels are checked
against a second, unrelated code path.
"""

import numpy as np
import pytest

from j1j2vqe.simulator import GateKind

PAULI_DENSE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

GATE_LETTERS = {
    GateKind.X: "X",
    GateKind.Y: "Y",
    GateKind.Z: "Z",
    GateKind.XX: "XX",
    GateKind.YY: "YY",
    GateKind.ZZ: "ZZ",
}


def kron_chain(letters: dict[int, str], n: int) -> np.ndarray:
    """Dense operator with the given letter on each listed site, I elsewhere."""
    out = np.array([[1.0]], dtype=complex)
    for site in range(n):
        out = np.kron(out, PAULI_DENSE[letters.get(site, "I")])
    return out


def dense_observable(terms, n: int) -> np.ndarray:
    """Explicit 2**n matrix of a coefficient/letter-map term list."""
    dim = 1 << n
    total = np.zeros((dim, dim), dtype=complex)
    for coeff, letters in terms:
        total += coeff * kron_chain(letters, n)
    return total


def involution_power(p: np.ndarray, theta: float) -> np.ndarray:
    """P**theta for an involution P, via its +1/-1 eigenprojectors."""
    eye = np.eye(p.shape[0], dtype=complex)
    return (eye + p) / 2 + np.exp(1j * np.pi * theta) * (eye - p) / 2


def dense_gate_unitary(kind: GateKind, targets, theta: float, n: int) -> np.ndarray:
    """Full 2**n unitary of one gate, built from the kron-chain involution."""
    letters = dict(zip(targets, GATE_LETTERS[kind]))
    return involution_power(kron_chain(letters, n), theta)


def dense_circuit_unitary(circ, params) -> np.ndarray:
    """Product of explicitly constructed dense gate matrices."""
    dim = 1 << circ.n_qubits
    u = np.eye(dim, dtype=complex)
    for gate in circ.gates:
        g = dense_gate_unitary(
            gate.kind, gate.targets, params[gate.param_index], circ.n_qubits
        )
        u = g @ u
    return u


def random_state(rng: np.random.Generator, n: int) -> np.ndarray:
    amps = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return amps / np.linalg.norm(amps)


@pytest.fixture(scope="session")
def run_registry():
    """Records produced anywhere in the suite, for the variational-bound check."""
    return []
