import numpy as np
import pytest

from conftest import dense_observable, random_state
from j1j2vqe.lattice import Boundary, build_lattice
from j1j2vqe.pauli import (
    ObservableSum,
    PauliString,
    apply_observable,
    apply_string,
    build_hamiltonian,
    expectation,
    heisenberg_bond,
    observable_sum,
    to_dense,
)
from j1j2vqe.simulator import StateVector, init_zero_state


def as_term_list(obs):
    return [(c, dict(s.ops)) for c, s in obs.terms]


class TestHeisenbergBond:
    def test_three_terms_on_two_qubits(self):
        obs = heisenberg_bond(0, 1, 1.0, 2)
        assert as_term_list(obs) == [
            (1.0, {0: "X", 1: "X"}),
            (1.0, {0: "Y", 1: "Y"}),
            (1.0, {0: "Z", 1: "Z"}),
        ]

    def test_negative_coefficient_carries_through(self):
        obs = heisenberg_bond(0, 1, -0.5, 4)
        assert all(c == -0.5 for c, _ in obs.terms)
        assert all(set(dict(s.ops)) == {0, 1} for _, s in obs.terms)

    def test_equal_indices_rejected(self):
        with pytest.raises(ValueError):
            heisenberg_bond(0, 0, 1.0, 2)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            heisenberg_bond(0, 5, 1.0, 4)


class TestBuildHamiltonian:
    def test_1x2_sign_flip(self):
        ham = build_hamiltonian(build_lattice(1, 2), -1.0, -0.5)
        assert as_term_list(ham) == [
            (1.0, {0: "X", 1: "X"}),
            (1.0, {0: "Y", 1: "Y"}),
            (1.0, {0: "Z", 1: "Z"}),
        ]

    def test_2x2_term_count_and_coefficients(self):
        lat = build_lattice(2, 2)
        ham = build_hamiltonian(lat, -1.0, -0.5)
        assert len(ham.terms) == 18  # (4 NN + 2 NNN) bonds x 3
        nn_pairs = set(lat.nn_edges)
        for coeff, string in ham.terms:
            pair = tuple(sorted(dict(string.ops)))
            assert coeff == (1.0 if pair in nn_pairs else 0.5)

    def test_j2_zero_drops_diagonal_terms(self):
        ham = build_hamiltonian(build_lattice(3, 4), -1.0, 0.0)
        assert len(ham.terms) == 51  # 17 bonds x 3
        assert all(c == 1.0 for c, _ in ham.terms)

    def test_xyz_exchange_symmetry(self):
        # every edge carries identical XX, YY and ZZ coefficients
        ham = build_hamiltonian(build_lattice(3, 3, Boundary.PERIODIC), -1.0, -0.7)
        by_pair = {}
        for coeff, string in ham.terms:
            pair = tuple(sorted(dict(string.ops)))
            by_pair.setdefault(pair, []).append(coeff)
        for coeffs in by_pair.values():
            assert len(coeffs) == 3
            assert coeffs[0] == coeffs[1] == coeffs[2]


class TestExpectation:
    def test_singlet_energy(self):
        # dense 4x4 oracle: lowest eigenvalue of XX + YY + ZZ is -3
        ham = heisenberg_bond(0, 1, 1.0, 2)
        m = dense_observable([(1.0, {0: a, 1: a}) for a in "XYZ"], 2)
        vals, vecs = np.linalg.eigh(m)
        assert vals[0] == pytest.approx(-3.0, abs=1e-12)
        singlet = StateVector(np.array([0, 1, -1, 0], complex) / np.sqrt(2), 2)
        assert expectation(ham, singlet) == pytest.approx(-3.0, abs=1e-10)

    def test_zero_state_energy(self):
        ham = heisenberg_bond(0, 1, 1.0, 2)
        assert expectation(ham, init_zero_state(2)) == pytest.approx(1.0, abs=1e-12)

    def test_dimension_mismatch_rejected(self):
        ham = heisenberg_bond(0, 1, 1.0, 2)
        with pytest.raises(ValueError, match="sites"):
            expectation(ham, init_zero_state(3))

    def test_non_normalized_rejected(self):
        ham = heisenberg_bond(0, 1, 1.0, 2)
        bad = StateVector(np.array([1.0, 0, 0, 1.0], complex), 2)
        with pytest.raises(ValueError, match="normalized"):
            expectation(ham, bad)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_matches_dense_matrix(self, n):
        rng = np.random.default_rng(42 + n)
        letters = ["X", "Y", "Z"]
        for _ in range(40):
            terms = []
            for _ in range(rng.integers(1, 6)):
                weight = int(rng.integers(0, n + 1))
                sites = rng.choice(n, size=weight, replace=False)
                ops = {int(s): letters[rng.integers(3)] for s in sites}
                terms.append((float(rng.normal()), ops))
            obs = observable_sum(
                [(c, PauliString.from_ops(ops, n)) for c, ops in terms], n
            )
            m = dense_observable(terms, n)
            amps = random_state(rng, n)
            got = expectation(obs, StateVector(amps, n))
            want = float(np.real(np.vdot(amps, m @ amps)))
            assert got == pytest.approx(want, abs=1e-12)

    def test_imaginary_part_small_for_hermitian(self):
        # accumulate term values as complex and check the raw residue
        rng = np.random.default_rng(7)
        ham = build_hamiltonian(build_lattice(2, 3), -1.0, -0.5)
        for _ in range(50):
            amps = random_state(rng, 6)
            acc = 0j
            for coeff, string in ham.terms:
                acc += coeff * np.vdot(amps, apply_string(string, amps))
            assert abs(acc.imag) < 1e-10

    def test_linearity(self):
        rng = np.random.default_rng(3)
        n = 3
        o1 = heisenberg_bond(0, 1, 1.0, n)
        o2 = heisenberg_bond(1, 2, 1.0, n) + heisenberg_bond(0, 2, -0.3, n)
        for _ in range(20):
            a, b = rng.normal(size=2)
            psi = StateVector(random_state(rng, n), n)
            combined = expectation(a * o1 + b * o2, psi)
            separate = a * expectation(o1, psi) + b * expectation(o2, psi)
            assert combined == pytest.approx(separate, abs=1e-10)

    def test_ground_vector_gives_e0(self):
        from j1j2vqe.spectrum import lowest_two

        ham = build_hamiltonian(build_lattice(2, 3), -1.0, -0.5)
        res = lowest_two(ham, want_vectors=True)
        assert expectation(ham, res.ground_vec) == pytest.approx(res.e0, abs=1e-9)


class TestObservableSum:
    def test_merges_duplicate_strings(self):
        s = PauliString.from_ops({0: "Z"}, 2)
        obs = observable_sum([(1.0, s), (2.5, s)], 2)
        assert obs.terms == ((3.5, s),)

    def test_drops_zero_coefficients(self):
        s = PauliString.from_ops({0: "Z"}, 2)
        t = PauliString.from_ops({1: "X"}, 2)
        obs = observable_sum([(1.0, s), (-1.0, s), (0.5, t)], 2)
        assert obs.terms == ((0.5, t),)

    def test_invalid_letter_rejected(self):
        with pytest.raises(ValueError):
            PauliString.from_ops({0: "W"}, 2)

    def test_site_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            PauliString.from_ops({4: "X"}, 2)


class TestApplyObservable:
    @pytest.mark.parametrize("n", [2, 3])
    def test_matvec_matches_dense(self, n):
        rng = np.random.default_rng(n)
        ham = build_hamiltonian(build_lattice(1, n), -1.0, 0.0)
        m = to_dense(ham)
        for _ in range(10):
            amps = random_state(rng, n)
            assert np.allclose(apply_observable(ham, amps), m @ amps, atol=1e-12)

    def test_real_input_stays_real_for_heisenberg(self):
        ham = build_hamiltonian(build_lattice(2, 2), -1.0, -0.5)
        v = np.random.default_rng(0).standard_normal(16)
        out = apply_observable(ham, v)
        assert out.dtype == np.float64
        assert np.allclose(out, np.real(to_dense(ham)) @ v, atol=1e-12)

    def test_identity_term_contributes_shift(self):
        n = 2
        obs = observable_sum(
            [(0.75, PauliString.from_ops({}, n)),
             (1.0, PauliString.from_ops({0: "Z"}, n))],
            n,
        )
        amps = random_state(np.random.default_rng(1), n)
        want = dense_observable([(0.75, {}), (1.0, {0: "Z"})], n) @ amps
        assert np.allclose(apply_observable(obs, amps), want, atol=1e-12)
