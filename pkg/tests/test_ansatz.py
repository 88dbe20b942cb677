"""Tests for the layered ansätze, initial states and resource counts."""

from dataclasses import replace

import numpy as np
import pytest

from src.core.ansatz import (
    EnsembleSpec,
    build_ansatz,
    count_resources,
    hf_determinant,
    prepare_initial_states,
)
from src.core.errors import DomainError, LayoutError, ShapeError
from src.core.mappings import assemble_platform_hamiltonian, make_layout, physical_subspace, register_operators
from src.core.simulator import GateKind, one_hot_leakage

LAYOUTS = {
    'qubit': lambda: make_layout('qubit', n_b_max=2),
    'qudit': lambda: make_layout('qudit', n_b_max=2),
    'qumode': lambda: make_layout('qumode', n_cut=5),
}


class TestBuildAnsatz:

    @pytest.mark.parametrize('platform, gates, params, entangler', [
        ('qubit', 96, 16, 12),
        ('qudit', 24, 16, 12),
        ('qumode', 16, 8, 4),
    ])
    def test_two_layer_resources(self, platform, gates, params, entangler):
        layout = make_layout(platform, n_b_max=3, n_cut=15)
        report = count_resources(build_ansatz(platform, 2, layout))
        assert report.entangling_gates == gates
        assert report.parameters == params
        assert report.entangler_parameters == entangler
        assert report.fabric_parameters == 4

    def test_pauli_style_costs_more(self):
        circuit = build_ansatz('qubit', 2, make_layout('qubit', n_b_max=3))
        assert count_resources(circuit, style='pauli').entangling_gates == 144

    @pytest.mark.parametrize('platform', ['qubit', 'qudit', 'qumode'])
    def test_resources_scale_with_depth(self, platform):
        layout = make_layout(platform, n_b_max=3, n_cut=15)
        one = count_resources(build_ansatz(platform, 1, layout))
        four = count_resources(build_ansatz(platform, 4, layout))
        assert four.entangling_gates == 4 * one.entangling_gates
        assert four.parameters == 4 * one.parameters
        assert four.per_layer == one.per_layer

    def test_per_layer_counts(self):
        report = count_resources(build_ansatz('qudit', 2, make_layout('qudit', n_b_max=3)))
        assert report.per_layer['entangling_gates'] * 2 == report.entangling_gates
        assert report.per_layer['parameters'] == 8

    def test_zero_layers_have_no_per_layer_counts(self):
        report = count_resources(build_ansatz('qudit', 0, make_layout('qudit', n_b_max=3)))
        assert report.entangling_gates == 0
        assert report.per_layer == {}

    def test_uneven_layers_are_rejected(self):
        one = build_ansatz('qudit', 1, make_layout('qudit', n_b_max=2))
        with pytest.raises(ShapeError):
            count_resources(replace(one, n_layers=3))

    def test_zero_layers_is_identity(self, rng):
        layout = make_layout('qudit', n_b_max=2)
        circuit = build_ansatz('qudit', 0, layout)
        assert circuit.n_params == 0
        assert circuit.gates == ()
        states = prepare_initial_states(layout)
        np.testing.assert_allclose(circuit.apply(states), states)

    def test_deeper_circuit_extends_slots(self, rng):
        layout = make_layout('qudit', n_b_max=2)
        shallow = build_ansatz('qudit', 1, layout)
        deep = build_ansatz('qudit', 2, layout)
        params = rng.uniform(-np.pi, np.pi, shallow.n_params)
        padded = np.concatenate([params, np.zeros(deep.n_params - shallow.n_params)])
        states = prepare_initial_states(layout)
        np.testing.assert_allclose(deep.apply(states, padded), shallow.apply(states, params), atol=1e-12)

    def test_slot_table(self):
        circuit = build_ansatz('qumode', 1, make_layout('qumode', n_cut=5))
        assert circuit.fabric_slots == (0, 1)
        assert circuit.entangler_slots == (2, 3)
        assert circuit.slot_usage() == {0: 1, 1: 1, 2: 2, 3: 2}
        assert circuit.gates[0].kind == GateKind.FABRIC_SINGLE

    def test_bind_and_serialize(self):
        circuit = build_ansatz('qumode', 1, make_layout('qumode', n_cut=5))
        bound = circuit.bind([0.1, 0.2, 0.3, 0.4])
        assert [entry['theta'] for entry in bound] == pytest.approx([0.1, 0.2, 0.3, 0.3, 0.4, 0.4])
        data = circuit.to_dict([0.1, 0.2, 0.3, 0.4])
        assert data['platform'] == 'qumode'
        assert len(data['gates']) == 6

    def test_parameter_shape_checked(self):
        circuit = build_ansatz('qudit', 1, make_layout('qudit', n_b_max=2))
        with pytest.raises(ShapeError):
            circuit.apply(prepare_initial_states(circuit.layout), [0.0, 1.0])

    def test_negative_layers(self):
        with pytest.raises(DomainError):
            build_ansatz('qudit', -1, make_layout('qudit'))

    def test_layout_must_match_platform(self):
        with pytest.raises(LayoutError):
            build_ansatz('qubit', 1, make_layout('qudit'))


class TestInitialStates:

    def test_hf_determinant(self):
        assert hf_determinant(4, 2) == 0b1100

    def test_reference_columns(self):
        layout = make_layout('qudit', n_b_max=3)
        states = prepare_initial_states(layout)
        assert states.shape == (layout.dim, 3)
        np.testing.assert_allclose(states.conj().T @ states, np.eye(3), atol=1e-14)

        expected_b = np.zeros(layout.dim, dtype=complex)
        expected_b[0b1001 * 4] = 1 / np.sqrt(2)
        expected_b[0b0110 * 4] = -1 / np.sqrt(2)
        assert states[0b1100 * 4, 0] == 1.0
        np.testing.assert_allclose(states[:, 1], expected_b, atol=1e-14)
        assert states[0b1100 * 4 + 1, 2] == 1.0

    def test_qubit_photon_codes(self):
        layout = make_layout('qubit', n_b_max=3)
        states = prepare_initial_states(layout)
        assert states[0b1100 * 16 + 0b1000, 0] == 1.0
        assert states[0b1100 * 16 + 0b0100, 2] == 1.0

    def test_states_are_singlets(self):
        layout = make_layout('qudit', n_b_max=2)
        states = prepare_initial_states(layout)
        S2 = register_operators(layout)['S2']
        np.testing.assert_allclose(np.einsum('ik,ij,jk->k', states.conj(), S2, states), 0.0, atol=1e-14)

    def test_subset_of_tags(self):
        layout = make_layout('qudit', n_b_max=0)
        states = prepare_initial_states(layout, ensemble=EnsembleSpec(tags=('A', 'B')))
        assert states.shape[1] == 2
        with pytest.raises(LayoutError):
            prepare_initial_states(layout)

    @pytest.mark.parametrize('n_electrons', [3, 0, 4])
    def test_invalid_electron_counts(self, n_electrons):
        with pytest.raises(DomainError):
            prepare_initial_states(make_layout('qudit'), n_electrons)

    def test_invalid_tags(self):
        with pytest.raises(DomainError):
            EnsembleSpec(tags=('A', 'A'))
        with pytest.raises(DomainError):
            EnsembleSpec(tags=('D',))

    def test_uniform_weights(self):
        np.testing.assert_allclose(EnsembleSpec().weights, [1 / 3] * 3)


class TestSymmetry:

    @pytest.mark.parametrize('platform', ['qubit', 'qudit', 'qumode'])
    def test_circuit_conserves_electron_number_and_spin(self, platform, rng):
        layout = LAYOUTS[platform]()
        circuit = build_ansatz(platform, 2, layout)
        states = prepare_initial_states(layout)
        ops = register_operators(layout)
        for _ in range(200):
            params = rng.uniform(-np.pi, np.pi, circuit.n_params)
            out = circuit.apply(states, params)
            for name, value in (('N', 2.0), ('Sz', 0.0), ('S2', 0.0)):
                expectations = np.real(np.einsum('ik,ij,jk->k', out.conj(), ops[name], out))
                np.testing.assert_allclose(expectations, value, atol=1e-10)
            assert one_hot_leakage(out, layout) < 1e-12

    def test_broken_pairing_leaves_the_singlet_sector(self, rng):
        layout = LAYOUTS['qudit']()
        circuit = build_ansatz('qudit', 2, layout, break_spin_pairing=True)
        assert not circuit.spin_paired
        params = rng.uniform(-np.pi, np.pi, circuit.n_params)
        out = circuit.apply(prepare_initial_states(layout), params)
        S2 = register_operators(layout)['S2']
        spin = np.real(np.einsum('ik,ij,jk->k', out.conj(), S2, out))
        assert np.max(spin) > 1e-3

    def test_qubit_and_qudit_circuits_agree(self, h2, rng):
        from src.core.qedfci import CavitySpec

        cav = CavitySpec(omega=1.0, coupling=0.05, n_b_max=2)
        qubit, qudit = LAYOUTS['qubit'](), LAYOUTS['qudit']()
        c_qubit, c_qudit = build_ansatz('qubit', 2, qubit), build_ansatz('qudit', 2, qudit)
        assert c_qubit.n_params == c_qudit.n_params
        params = rng.uniform(-np.pi, np.pi, c_qubit.n_params)

        out_qubit = c_qubit.apply(prepare_initial_states(qubit), params)
        out_qudit = c_qudit.apply(prepare_initial_states(qudit), params)
        np.testing.assert_allclose(out_qubit[physical_subspace(qubit, 2)],
                                   out_qudit[physical_subspace(qudit, 2)], atol=1e-12)

        H_qubit = assemble_platform_hamiltonian(h2, cav, qubit).matrix
        H_qudit = assemble_platform_hamiltonian(h2, cav, qudit).matrix
        e_qubit = np.real(np.einsum('ik,ij,jk->k', out_qubit.conj(), H_qubit, out_qubit))
        e_qudit = np.real(np.einsum('ik,ij,jk->k', out_qudit.conj(), H_qudit, out_qudit))
        np.testing.assert_allclose(e_qubit, e_qudit, atol=1e-10)
