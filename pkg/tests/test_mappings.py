"""Tests for the fermion and boson encodings."""

import numpy as np
import pytest

from src.core.errors import ConfigurationError, DomainError, LayoutError
from src.core.mappings import (
    PauliTerm,
    RegisterLayout,
    assemble_platform_hamiltonian,
    boson_creation,
    boson_creation_qubit,
    boson_creation_qudit,
    boson_ops_qumode,
    creation_matrices,
    excitation_matrices,
    fermion_spin_operators,
    gell_mann,
    jw_creation,
    make_layout,
    pauli_sum_matrix,
    physical_subspace,
    register_operators,
)
from src.core.qedfci import build_hybrid_basis, build_pauli_fierz


def ladder(n_b_max):
    return np.diag(np.sqrt(np.arange(1, n_b_max + 1)), k=-1)


class TestJordanWigner:

    @pytest.mark.parametrize('n_qubits', [4, 6])
    def test_anticommutation(self, n_qubits):
        cre = creation_matrices(n_qubits)
        eye = np.eye(2 ** n_qubits)
        for p in range(n_qubits):
            for q in range(n_qubits):
                ann = cre[q].conj().T
                np.testing.assert_allclose(cre[p] @ ann + ann @ cre[p], eye * (p == q), atol=1e-14)
                np.testing.assert_allclose(cre[p] @ cre[q] + cre[q] @ cre[p], 0.0, atol=1e-14)

    def test_first_creation_sets_most_significant_qubit(self):
        state = np.zeros(16)
        state[0] = 1.0
        out = creation_matrices(4)[0] @ state
        assert abs(out[0b1000]) == pytest.approx(1.0)

    def test_hartree_fock_quantum_numbers(self):
        ops = fermion_spin_operators(4)
        hf = np.zeros(16)
        hf[0b1100] = 1.0
        assert hf @ ops['N'] @ hf == pytest.approx(2.0)
        assert hf @ ops['Sz'] @ hf == pytest.approx(0.0)
        assert np.real(hf @ ops['S2'] @ hf) == pytest.approx(0.0)

    def test_excitations_are_spin_free(self):
        E = excitation_matrices(4)
        ops = fermion_spin_operators(4)
        for p in range(2):
            for q in range(2):
                np.testing.assert_allclose(E[p, q] @ ops['S2'], ops['S2'] @ E[p, q], atol=1e-13)

    def test_out_of_range_orbital(self):
        with pytest.raises(DomainError):
            jw_creation(4, 4)

    def test_invalid_pauli_letter(self):
        with pytest.raises(DomainError):
            PauliTerm(1.0, 'XQ')
        with pytest.raises(DomainError):
            pauli_sum_matrix([])


class TestBosonMaps:

    def test_qubit_map_on_one_hot_states(self):
        layout = make_layout('qubit', n_b_max=3)
        bdag = pauli_sum_matrix(boson_creation_qubit(3))
        codes = [layout.photon_code(n) for n in range(4)]
        block = bdag[np.ix_(codes, codes)]
        np.testing.assert_allclose(block, ladder(3), atol=1e-14)

    def test_qubit_map_preserves_one_hot_space(self):
        layout = make_layout('qubit', n_b_max=2)
        bdag = boson_creation(layout)
        codes = [layout.photon_code(n) for n in range(3)]
        outside = [i for i in range(8) if i not in codes]
        np.testing.assert_allclose(bdag[np.ix_(outside, codes)], 0.0, atol=1e-14)

    def test_qubit_map_needs_a_photon(self):
        with pytest.raises(DomainError):
            boson_creation_qubit(0)

    @pytest.mark.parametrize('d', [2, 4, 5])
    def test_qudit_map(self, d):
        np.testing.assert_allclose(boson_creation_qudit(d), ladder(d - 1), atol=1e-14)

    def test_qumode_ops(self):
        bdag, b = boson_ops_qumode(6)
        np.testing.assert_allclose(bdag, ladder(6))
        commutator = b @ bdag - bdag @ b
        # exact except at the truncation edge
        np.testing.assert_allclose(np.diag(commutator)[:-1], 1.0, atol=1e-14)
        assert np.diag(commutator)[-1].real == pytest.approx(-6.0)

    def test_gell_mann(self):
        X = gell_mann(3, 0, 2, 'X')
        Y = gell_mann(3, 0, 2, 'Y')
        np.testing.assert_allclose(X, X.conj().T)
        np.testing.assert_allclose(Y, Y.conj().T)
        assert Y[2, 0] == 1j
        with pytest.raises(DomainError):
            gell_mann(3, 2, 1, 'X')
        with pytest.raises(DomainError):
            gell_mann(3, 0, 1, 'Z')


class TestRegisterLayout:

    def test_qubit_layout(self):
        layout = make_layout('qubit', n_b_max=3)
        assert layout.site_dims == [2] * 8
        assert layout.boson_sites == [4, 5, 6, 7]
        assert layout.photon_code(0) == 0b1000
        assert layout.boson_site_of(2) == 6
        assert layout.dim == 256

    def test_qudit_and_qumode_layouts(self):
        qudit = make_layout('qudit', n_b_max=3)
        qumode = make_layout('qumode', n_cut=15)
        assert qudit.site_dims == [2, 2, 2, 2, 4]
        assert qumode.site_dims == [2, 2, 2, 2, 16]
        assert qumode.photon_cutoff == 15
        with pytest.raises(LayoutError):
            qudit.boson_site_of(0)

    @pytest.mark.parametrize('kwargs', [
        {'platform': 'trapped', 'n_ferm': 4, 'n_photon_levels': 4},
        {'platform': 'qubit', 'n_ferm': 3, 'n_photon_levels': 4},
        {'platform': 'qudit', 'n_ferm': 4, 'n_photon_levels': 0},
        {'platform': 'qumode', 'n_ferm': 4, 'n_photon_levels': 1},
    ])
    def test_invalid_layouts(self, kwargs):
        with pytest.raises(LayoutError):
            RegisterLayout(**kwargs)

    def test_photon_code_range(self):
        with pytest.raises(LayoutError):
            make_layout('qudit', n_b_max=3).photon_code(4)

    def test_physical_subspace_order(self):
        layout = make_layout('qubit', n_b_max=1)
        idx = physical_subspace(layout, 2)
        assert len(idx) == 12
        # HF with zero photons, then with one photon
        assert idx[-2] == 0b1100 * 4 + 0b10
        assert idx[-1] == 0b1100 * 4 + 0b01


class TestPlatformHamiltonian:

    @pytest.mark.parametrize('platform, kwargs', [
        ('qubit', {'n_b_max': 3}),
        ('qudit', {'n_b_max': 3}),
        ('qumode', {'n_cut': 3}),
    ])
    def test_physical_block_matches_oracle(self, h2, cavity, platform, kwargs):
        layout = make_layout(platform, **kwargs)
        H = assemble_platform_hamiltonian(h2, cavity, layout).matrix
        idx = physical_subspace(layout, 2)
        reference = build_pauli_fierz(h2, cavity, build_hybrid_basis(2, 2, 3)).matrix
        np.testing.assert_allclose(H[np.ix_(idx, idx)], reference, atol=1e-12)

    def test_physical_space_is_invariant(self, h2, cavity):
        layout = make_layout('qubit', n_b_max=3)
        H = assemble_platform_hamiltonian(h2, cavity, layout).matrix
        idx = physical_subspace(layout, 2)
        rest = np.setdiff1d(np.arange(layout.dim), idx)
        np.testing.assert_allclose(H[np.ix_(rest, idx)], 0.0, atol=1e-12)

    @pytest.mark.parametrize('platform, kwargs', [
        ('qubit', {'n_b_max': 3}),
        ('qudit', {'n_b_max': 3}),
        ('qumode', {'n_cut': 3}),
    ])
    def test_register_hamiltonian_conserves_spin(self, h2, platform, kwargs):
        from src.core.qedfci import CavitySpec

        layout = make_layout(platform, **kwargs)
        H = assemble_platform_hamiltonian(h2, CavitySpec(omega=1.0, coupling=0.25, n_b_max=3), layout).matrix
        ops = register_operators(layout)
        for name in ('N', 'Sz', 'S2'):
            assert np.max(np.abs(H @ ops[name] - ops[name] @ H)) < 1e-10

    def test_cutoff_mismatch(self, h2, cavity):
        with pytest.raises(ConfigurationError):
            assemble_platform_hamiltonian(h2, cavity, make_layout('qumode', n_cut=15))

    def test_orbital_mismatch(self, h2, cavity):
        layout = RegisterLayout('qudit', n_ferm=6, n_photon_levels=4)
        with pytest.raises(ConfigurationError):
            assemble_platform_hamiltonian(h2, cavity, layout)

    def test_register_photon_number(self):
        layout = make_layout('qudit', n_b_max=3)
        ops = register_operators(layout)
        np.testing.assert_allclose(np.diag(ops['photons'])[:4].real, [0, 1, 2, 3], atol=1e-14)
