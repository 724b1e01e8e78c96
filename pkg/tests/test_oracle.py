import numpy as np
import pytest

from qubittree import oracle
from qubittree.fermion import ladder_binary_xy, number_operator
from qubittree.pauli import OracleSizeError, PauliTerm, to_dense
from qubittree.spin import hm_from_quadratics, ladder_hamiltonian_dense
from qubittree.tree import build_cf_binary, generators

from _oracles import dense_evolution, random_unit


class TestApplyPauli:
    def test_z_on_zero(self):
        psi = oracle.basis_state([0])
        assert np.allclose(oracle.apply_pauli(PauliTerm.parse("Z"), psi), psi)

    def test_ixz_on_vacuum(self):
        out = oracle.apply_pauli(PauliTerm.parse("+iXZ"), oracle.vacuum(2))
        assert np.allclose(out, 1j * oracle.basis_state([1, 0]))

    def test_product_of_generators(self):
        rng = np.random.default_rng(0)
        gs = generators(build_cf_binary(2))
        psi = random_unit(rng, 8)
        out = psi
        for g in reversed(gs.generators):
            out = oracle.apply_pauli(g, out)
        iota = 1j ** gs.product_phase()
        assert np.allclose(out, iota * psi)

    @pytest.mark.parametrize("text", ["+iXYZ", "-YYI", "ZZX", "-iIXY"])
    def test_matches_dense(self, text):
        rng = np.random.default_rng(1)
        psi = random_unit(rng, 8)
        t = PauliTerm.parse(text)
        assert np.abs(oracle.apply_pauli(t, psi) - to_dense(t) @ psi).max() < 1e-12

    def test_twice(self):
        rng = np.random.default_rng(2)
        psi = random_unit(rng, 16)
        t = PauliTerm.parse("+iXYZX")
        assert np.allclose(oracle.apply_pauli(t, oracle.apply_pauli(t, psi)), -psi)

    def test_norm(self):
        rng = np.random.default_rng(3)
        psi = random_unit(rng, 32)
        assert np.isclose(np.linalg.norm(oracle.apply_pauli(PauliTerm.parse("-iXYZYX"), psi)), 1)

    def test_width_mismatch(self):
        with pytest.raises(ValueError):
            oracle.apply_pauli(PauliTerm.parse("XX"), oracle.vacuum(3))

    def test_state_cap(self):
        with pytest.raises(OracleSizeError):
            oracle.vacuum(15)

    def test_wide_state_without_matrix(self):
        out = oracle.apply_pauli(PauliTerm.single(12, 11, "X"), oracle.vacuum(12))
        assert out[1] == 1


class TestExpHamiltonian:
    def test_zero(self):
        assert np.allclose(oracle.exp_hamiltonian(np.zeros((4, 4)), 1.3), np.eye(4))

    def test_z_quarter_turn(self):
        u = oracle.exp_hamiltonian(np.diag([1.0, -1.0]), np.pi / 2)
        assert np.allclose(u, np.diag([np.exp(-1j * np.pi / 2), np.exp(1j * np.pi / 2)]))

    def test_vacuum_unchanged_by_sigma_terms(self):
        ladders = ladder_binary_xy(build_cf_binary(2))
        hm = hm_from_quadratics(3, sigma=[(0, 1, 0.7), (1, 2, -0.4), (2, 2, 0.3)])
        u = oracle.exp_hamiltonian(ladder_hamiltonian_dense(ladders, hm), 0.9)
        assert np.allclose(u @ oracle.vacuum(3), oracle.vacuum(3))

    def test_unitary_and_series_cross_check(self):
        rng = np.random.default_rng(4)
        a = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
        h = a + a.conj().T
        u = oracle.exp_hamiltonian(h, 0.4)
        assert np.abs(u.conj().T @ u - np.eye(16)).max() < 1e-9
        assert np.abs(u - dense_evolution(h, 0.4)).max() < 1e-9

    def test_composition(self):
        rng = np.random.default_rng(5)
        a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        h = a + a.conj().T
        u12 = oracle.exp_hamiltonian(h, 0.3) @ oracle.exp_hamiltonian(h, 0.5)
        assert np.abs(u12 - oracle.exp_hamiltonian(h, 0.8)).max() < 1e-8

    def test_non_hermitian(self):
        with pytest.raises(ValueError):
            oracle.exp_hamiltonian(np.array([[0, 1], [0, 0]]), 1.0)

    def test_cap(self):
        with pytest.raises(OracleSizeError):
            oracle.exp_hamiltonian(np.zeros((2048, 2048)), 1.0)


class TestExpectation:
    def test_vacuum_z(self):
        assert oracle.expectation(oracle.vacuum(3), PauliTerm.parse("ZII")) == 1

    def test_vacuum_occupations(self):
        t = build_cf_binary(3)
        vac = oracle.vacuum(7)
        assert all(abs(oracle.expectation(vac, number_operator(t, j).to_dense())) < 1e-12 for j in t.nodes)

    def test_unit_states_total_number(self):
        t = build_cf_binary(2)
        ntot = oracle.total_number(ladder_binary_xy(t))
        for j in (2, 3):
            bits = [0, 0, 0]
            bits[j - 1] = 1
            assert np.isclose(oracle.expectation(oracle.basis_state(bits), ntot), 2)

    def test_real_for_hermitian(self):
        rng = np.random.default_rng(6)
        psi = random_unit(rng, 8)
        assert abs(oracle.expectation(psi, PauliTerm.parse("XYZ")).imag) < 1e-10

    def test_paths_agree(self):
        rng = np.random.default_rng(7)
        psi = random_unit(rng, 16)
        for text in ("+iXZYI", "-ZZXX", "YIIY"):
            t = PauliTerm.parse(text)
            via_apply = oracle.expectation(psi, t)
            via_dense = oracle.expectation(psi, to_dense(t))
            assert abs(via_apply - via_dense) < 1e-10

    def test_dim_mismatch(self):
        with pytest.raises(ValueError):
            oracle.expectation(oracle.vacuum(2), np.eye(8))


class TestHelpers:
    def test_bits_round_trip(self):
        for idx in range(16):
            bits = oracle.bits_of(idx, 4)
            assert np.argmax(np.abs(oracle.basis_state(bits))) == idx

    def test_generator_covariance_antisymmetric(self):
        rng = np.random.default_rng(8)
        g = list(generators(build_cf_binary(2)))
        m = oracle.generator_covariance(random_unit(rng, 8), g)
        assert np.abs(m + m.T).max() < 1e-12
