"""Pauli-string observables and their statevector expectation values.

Observables are weighted sums of Pauli strings with real coefficients.
Strings are stored sparsely (site -> letter); every Hamiltonian term here
touches at most two sites, so evaluation cost scales with the term weight,
not the qubit count. Expectation values fuse the XX + YY + ZZ triple of a
Heisenberg bond into a single pass over the state when possible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .lattice import Lattice
from .simulator import StateVector, _quad_view

PAULI_LETTERS = ("X", "Y", "Z")

_PM = np.array([1.0, -1.0])  # (-1)**bit phase along one tensor axis

NORM_TOL = 1e-10


@dataclass(frozen=True)
class PauliString:
    """Tensor product of Pauli letters on a subset of sites.

    ops holds (site, letter) pairs sorted by site; an empty tuple is the
    identity. Sites not listed carry the identity.
    """

    ops: tuple[tuple[int, str], ...]
    n_sites: int

    def __post_init__(self) -> None:
        if self.n_sites < 1:
            raise ValueError(f"n_sites must be positive, got {self.n_sites}")
        sites = [s for s, _ in self.ops]
        if sites != sorted(set(sites)):
            raise ValueError(f"ops must be sorted by site without repeats: {self.ops}")
        for s, letter in self.ops:
            if not 0 <= s < self.n_sites:
                raise ValueError(f"site {s} out of range for {self.n_sites} sites")
            if letter not in PAULI_LETTERS:
                raise ValueError(f"unknown Pauli letter {letter!r}")

    @classmethod
    def from_ops(cls, ops: Mapping[int, str], n_sites: int) -> "PauliString":
        return cls(tuple(sorted(ops.items())), n_sites)

    @property
    def weight(self) -> int:
        return len(self.ops)


@dataclass(frozen=True)
class ObservableSum:
    """Weighted sum of Pauli strings; Hermitian since coefficients are real."""

    terms: tuple[tuple[float, PauliString], ...]
    n_sites: int

    def __post_init__(self) -> None:
        for _, string in self.terms:
            if string.n_sites != self.n_sites:
                raise ValueError(
                    f"term on {string.n_sites} sites in a {self.n_sites}-site sum"
                )
        object.__setattr__(self, "_fused", _group_terms(self))

    def __add__(self, other: "ObservableSum") -> "ObservableSum":
        if not isinstance(other, ObservableSum):
            return NotImplemented
        if other.n_sites != self.n_sites:
            raise ValueError("cannot add observables on different site counts")
        return observable_sum(list(self.terms) + list(other.terms), self.n_sites)

    def __mul__(self, scale: float) -> "ObservableSum":
        return observable_sum(
            [(scale * c, s) for c, s in self.terms], self.n_sites
        )

    __rmul__ = __mul__


def observable_sum(
    terms: Iterable[tuple[float, PauliString]], n_sites: int
) -> ObservableSum:
    """Merge duplicate strings, drop zero coefficients, keep first-seen order."""
    merged: dict[PauliString, float] = {}
    order: list[PauliString] = []
    for coeff, string in terms:
        if string not in merged:
            merged[string] = 0.0
            order.append(string)
        merged[string] += float(coeff)
    kept = tuple((merged[s], s) for s in order if merged[s] != 0.0)
    return ObservableSum(kept, n_sites)


def heisenberg_bond(i: int, j: int, coeff: float, n_sites: int) -> ObservableSum:
    """coeff * (X_i X_j + Y_i Y_j + Z_i Z_j)."""
    if i == j:
        raise ValueError(f"bond endpoints must differ, got ({i}, {j})")
    for s in (i, j):
        if not 0 <= s < n_sites:
            raise ValueError(f"site {s} out of range for {n_sites} sites")
    terms = [
        (coeff, PauliString.from_ops({i: letter, j: letter}, n_sites))
        for letter in PAULI_LETTERS
    ]
    return observable_sum(terms, n_sites)


def build_hamiltonian(lat: Lattice, j1: float, j2: float) -> ObservableSum:
    """Heisenberg Hamiltonian -j1 * sum_NN S_i.S_j - j2 * sum_NNN S_i.S_j.

    Spin operators are bare Pauli matrices (no 1/2 factors). Bonds with a
    zero coupling are dropped entirely.
    """
    terms: list[tuple[float, PauliString]] = []
    n = lat.n_sites
    if j1 != 0.0:
        for i, j in lat.nn_edges:
            terms.extend(heisenberg_bond(i, j, -j1, n).terms)
    if j2 != 0.0:
        for i, j in lat.nnn_edges:
            terms.extend(heisenberg_bond(i, j, -j2, n).terms)
    return observable_sum(terms, n)


def apply_string(string: PauliString, amps: np.ndarray) -> np.ndarray:
    """Return P @ amps for one Pauli string.

    The result is a fresh array. If amps is real and the string has an even
    number of Y factors, the result stays real (the Hamiltonian terms here
    are all of that kind, which keeps Krylov iterations in real arithmetic).
    """
    n = string.n_sites
    if amps.shape != (1 << n,):
        raise ValueError(f"state has shape {amps.shape}, expected ({1 << n},)")
    if not string.ops:
        return amps.copy()
    t = amps.reshape((2,) * n)
    n_y = 0
    for site, letter in string.ops:
        if letter != "Z":
            t = np.flip(t, axis=site)
        if letter != "X":
            shape = [1] * n
            shape[site] = 2
            t = t * _PM.reshape(shape)
        if letter == "Y":
            n_y += 1
    # each Y contributes a global factor -i on top of flip * sign
    if n_y % 2 == 0:
        factor = -1.0 if n_y % 4 == 2 else 1.0
    else:
        factor = (-1j) ** n_y
    if factor != 1.0:
        t = t * factor
    out = t.reshape(-1)
    if out.base is not None and out.base is amps:
        out = out.copy()
    return out


def _norm_sq(amps: np.ndarray) -> float:
    return float(np.real(np.vdot(amps, amps)))


def _check_state(obs_sites: int, psi: StateVector) -> float:
    if psi.n_qubits != obs_sites:
        raise ValueError(
            f"observable on {obs_sites} sites, state has {psi.n_qubits} qubits"
        )
    nsq = _norm_sq(psi.amplitudes)
    if abs(np.sqrt(nsq) - 1.0) > NORM_TOL:
        raise ValueError(f"state is not normalized: |psi| = {np.sqrt(nsq)!r}")
    return nsq


@dataclass(frozen=True)
class _FusedForm:
    """Term grouping: full Heisenberg bonds, identity weight, leftovers."""

    bonds: tuple[tuple[int, int, float], ...]
    identity: float
    rest: tuple[tuple[float, PauliString], ...]


def _group_terms(obs: ObservableSum) -> _FusedForm:
    by_pair: dict[tuple[int, int], dict[str, float]] = {}
    identity = 0.0
    rest: list[tuple[float, PauliString]] = []
    for coeff, string in obs.terms:
        if string.weight == 0:
            identity += coeff
            continue
        if string.weight == 2:
            (i, li), (j, lj) = string.ops
            if li == lj:
                d = by_pair.setdefault((i, j), {})
                d[li] = d.get(li, 0.0) + coeff
                continue
        rest.append((coeff, string))
    bonds: list[tuple[int, int, float]] = []
    for (i, j), letters in by_pair.items():
        vals = [letters.get(letter) for letter in PAULI_LETTERS]
        if None not in vals and vals[0] == vals[1] == vals[2]:
            bonds.append((i, j, vals[0]))
        else:
            for letter, c in letters.items():
                rest.append(
                    (c, PauliString.from_ops({i: letter, j: letter}, obs.n_sites))
                )
    return _FusedForm(tuple(bonds), identity, tuple(rest))


def _fused_form(obs: ObservableSum) -> _FusedForm:
    return obs._fused  # type: ignore[attr-defined]


def _bond_expectation(amps: np.ndarray, i: int, j: int, norm_sq: float) -> float:
    """<XX + YY + ZZ> on sites (i, j) in one pass over the state."""
    v = _quad_view(amps, min(i, j), max(i, j))
    g01 = v[:, 0, :, 1, :]
    g10 = v[:, 1, :, 0, :]
    s01 = float(np.real(np.vdot(g01, g01)))
    s10 = float(np.real(np.vdot(g10, g10)))
    zz = norm_sq - 2.0 * (s01 + s10)
    xxyy = 4.0 * float(np.real(np.vdot(g01, g10)))
    return zz + xxyy


def expectation(obs: ObservableSum, psi: StateVector) -> float:
    """<psi| obs |psi> for a normalized state.

    Accumulates term by term; Heisenberg-bond triples are evaluated fused.
    The imaginary residue is below 1e-10 for Hermitian sums and is dropped.
    """
    nsq = _check_state(obs.n_sites, psi)
    form = _fused_form(obs)
    amps = psi.amplitudes
    total = form.identity * nsq
    for i, j, coeff in form.bonds:
        total += coeff * _bond_expectation(amps, i, j, nsq)
    for coeff, string in form.rest:
        total += coeff * float(np.real(np.vdot(amps, apply_string(string, amps))))
    return total


def apply_observable(obs: ObservableSum, amps: np.ndarray) -> np.ndarray:
    """Return (obs @ amps) as a new array; matrix-free matvec for solvers.

    Preserves a real dtype whenever every term does (true for Heisenberg
    Hamiltonians, whose YY terms carry an even number of Y factors).
    """
    n = obs.n_sites
    if amps.shape != (1 << n,):
        raise ValueError(f"state has shape {amps.shape}, expected ({1 << n},)")
    form = _fused_form(obs)
    out = form.identity * amps if form.identity != 0.0 else np.zeros_like(amps)
    for i, j, coeff in form.bonds:
        v = _quad_view(amps, min(i, j), max(i, j))
        o = _quad_view(out, min(i, j), max(i, j))
        o[:, 0, :, 0, :] += coeff * v[:, 0, :, 0, :]
        o[:, 1, :, 1, :] += coeff * v[:, 1, :, 1, :]
        g01 = v[:, 0, :, 1, :]
        g10 = v[:, 1, :, 0, :]
        o[:, 0, :, 1, :] += coeff * (2.0 * g10 - g01)
        o[:, 1, :, 0, :] += coeff * (2.0 * g01 - g10)
    for coeff, string in form.rest:
        term = apply_string(string, amps)
        if np.iscomplexobj(term) and not np.iscomplexobj(out):
            out = out.astype(term.dtype)
        out += coeff * term
    return out


def to_dense(obs: ObservableSum) -> np.ndarray:
    """Assemble the full 2**n x 2**n matrix (n <= 14 guard)."""
    from scipy import sparse

    n = obs.n_sites
    if n > 14:
        raise ValueError(f"dense assembly capped at 14 sites, got {n}")
    dim = 1 << n
    single = {
        "X": sparse.csr_matrix(np.array([[0, 1], [1, 0]], dtype=np.complex128)),
        "Y": sparse.csr_matrix(np.array([[0, -1j], [1j, 0]], dtype=np.complex128)),
        "Z": sparse.csr_matrix(np.array([[1, 0], [0, -1]], dtype=np.complex128)),
    }
    eye2 = sparse.identity(2, dtype=np.complex128, format="csr")
    total = sparse.csr_matrix((dim, dim), dtype=np.complex128)
    for coeff, string in obs.terms:
        letters = dict(string.ops)
        m = sparse.identity(1, dtype=np.complex128, format="csr")
        for site in range(n):
            m = sparse.kron(m, single.get(letters.get(site), eye2), format="csr")
        total = total + coeff * m
    return np.asarray(total.todense())
