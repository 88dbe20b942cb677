"""Tests for gates, compilation and the state-vector simulator."""

import logging
import math

import numpy as np
import pytest
from scipy.linalg import expm

from src.core.errors import DomainError, GateDefinitionError, LayoutError
from src.core.mappings import PAULI, boson_ops_qumode, make_layout, register_operators
from src.core.simulator import (
    Gate,
    GateKind,
    apply,
    apply_displacement,
    apply_fabric_block,
    apply_gates,
    compile_controlled_displacement,
    compile_controlled_givens,
    compile_gate,
    controlled_displacement,
    displacement,
    entangling_count,
    fock_tail_weight,
    gate_matrix,
    givens_qubit,
    givens_qudit,
    momentum_displacement,
    one_hot_leakage,
    sequence_matrix,
)
from tests.conftest import random_state

X, Y = PAULI['X'], PAULI['Y']


def basis_state(dim, index):
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def assert_unitary(U):
    np.testing.assert_allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=1e-12)


class TestLocalMatrices:

    def test_givens_qubit_action(self):
        theta = 0.4
        out = givens_qubit(theta) @ basis_state(4, 0b01)
        np.testing.assert_allclose(out, [0, math.cos(theta), math.sin(theta), 0], atol=1e-15)

    def test_givens_qubit_generator(self):
        theta = 0.83
        generator = 0.5j * theta * (np.kron(X, Y) - np.kron(Y, X))
        np.testing.assert_allclose(givens_qubit(theta), expm(generator), atol=1e-13)

    def test_two_level_qudit_givens_is_ry(self):
        theta = 0.61
        ry = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
        np.testing.assert_allclose(givens_qudit(theta, 2, 0), ry, atol=1e-15)

    def test_qudit_level_range(self):
        with pytest.raises(LayoutError):
            givens_qudit(0.1, 3, 2)

    def test_displacement_matches_expm(self):
        bdag, b = boson_ops_qumode(9)
        np.testing.assert_allclose(displacement(0.3, 10), expm(0.3 * (b - bdag)), atol=1e-12)
        np.testing.assert_allclose(momentum_displacement(0.3, 10), expm(-0.3j * (b + bdag)), atol=1e-12)

    def test_displaced_vacuum_is_coherent(self):
        theta = 0.5
        vacuum = basis_state(40, 0)
        out = displacement(theta, 40) @ vacuum
        alpha = -theta
        expected = [math.exp(-alpha ** 2 / 2) * alpha ** n / math.sqrt(math.factorial(n)) for n in range(6)]
        np.testing.assert_allclose(out[:6], expected, atol=1e-10)

    def test_controlled_displacement_blocks(self):
        cd = controlled_displacement(0.2, 6)
        np.testing.assert_allclose(cd[:6, :6], displacement(0.2, 6), atol=1e-14)
        np.testing.assert_allclose(cd[6:, 6:], displacement(-0.2, 6), atol=1e-14)
        np.testing.assert_allclose(cd[:6, 6:], 0.0)


class TestCompilation:

    @pytest.fixture
    def layout(self):
        return make_layout('qubit', n_orb=1, n_b_max=1)

    @pytest.mark.parametrize('style, entangling', [('cry', 4), ('pauli', 6)])
    def test_controlled_givens(self, layout, style, entangling):
        gate = Gate(GateKind.CONTROLLED_GIVENS_QUBIT, (0, 3, 2), slot=0, scale=0.5)
        params = [0.73]
        compiled = compile_controlled_givens(gate, style)
        np.testing.assert_allclose(sequence_matrix(compiled, params, layout),
                                   gate_matrix(gate, 0.5 * 0.73, layout), atol=1e-12)
        assert entangling_count([gate], style) == entangling
        assert all(g.compiled for g in compiled)

    def test_unknown_style(self, layout):
        gate = Gate(GateKind.CONTROLLED_GIVENS_QUBIT, (0, 3, 2), slot=0)
        with pytest.raises(DomainError):
            compile_controlled_givens(gate, 'swap')

    def test_controlled_displacement(self):
        layout = make_layout('qumode', n_orb=1, n_cut=7)
        gate = Gate(GateKind.CONTROLLED_DISPLACEMENT, (1, 2), slot=0)
        compiled = compile_controlled_displacement(gate)
        np.testing.assert_allclose(sequence_matrix(compiled, [0.41], layout),
                                   gate_matrix(gate, 0.41, layout), atol=1e-12)
        assert entangling_count([gate]) == 2

    def test_wrong_kind(self):
        with pytest.raises(GateDefinitionError):
            compile_controlled_givens(Gate(GateKind.CX, (0, 1)))
        with pytest.raises(GateDefinitionError):
            compile_controlled_displacement(Gate(GateKind.CX, (0, 1)))

    def test_other_gates_pass_through(self):
        gate = Gate(GateKind.RY, (0,), slot=0)
        assert compile_gate(gate) == [gate]
        assert entangling_count([gate, Gate(GateKind.CX, (0, 1))]) == 1


class TestPlatformAgreement:

    @pytest.mark.parametrize('level', [0, 1])
    def test_qubit_and_qudit_givens_agree_on_one_hot_states(self, level):
        qubit = make_layout('qubit', n_orb=1, n_b_max=2)
        qudit = make_layout('qudit', n_orb=1, n_b_max=2)
        theta = 0.37
        u_qubit = gate_matrix(
            Gate(GateKind.CONTROLLED_GIVENS_QUBIT, (0, qubit.boson_site_of(level + 1), qubit.boson_site_of(level))),
            theta, qubit)
        u_qudit = gate_matrix(Gate(GateKind.CONTROLLED_GIVENS_QUDIT, (0, 2), level=level), theta, qudit)

        idx = [f * qubit.boson_dim + qubit.photon_code(n) for f in range(4) for n in range(3)]
        np.testing.assert_allclose(u_qubit[np.ix_(idx, idx)], u_qudit, atol=1e-14)


class TestApplication:

    def test_fabric_pair_sign(self):
        layout = make_layout('qudit', n_orb=2, n_b_max=1)
        theta = 0.3
        state = basis_state(layout.dim, 0b1100 * 2)
        out = apply_fabric_block(state, 'pair', 0, 1, theta, layout)
        assert out[0b1100 * 2].real == pytest.approx(math.cos(theta))
        assert out[0b0011 * 2].real == pytest.approx(math.sin(theta))

    @pytest.mark.parametrize('kind', [GateKind.FABRIC_SINGLE, GateKind.FABRIC_PAIR])
    def test_fabric_conserves_number_and_spin(self, kind):
        layout = make_layout('qudit', n_orb=2, n_b_max=1)
        U = gate_matrix(Gate(kind, (0, 1, 2, 3)), 0.9, layout)
        ops = register_operators(layout)
        assert_unitary(U)
        for name in ('N', 'Sz', 'S2'):
            np.testing.assert_allclose(U @ ops[name], ops[name] @ U, atol=1e-12)

    def test_fabric_block_needs_neighbours(self):
        layout = make_layout('qudit', n_orb=3, n_b_max=1)
        with pytest.raises(LayoutError):
            apply_fabric_block(basis_state(layout.dim, 0), 'single', 0, 2, 0.1, layout)

    def test_controlled_gates_are_unitary(self):
        qumode = make_layout('qumode', n_orb=1, n_cut=5)
        qudit = make_layout('qudit', n_orb=1, n_b_max=3)
        assert_unitary(gate_matrix(Gate(GateKind.CONTROLLED_DISPLACEMENT, (0, 2)), 0.7, qumode))
        assert_unitary(gate_matrix(Gate(GateKind.CONTROLLED_PARITY, (0, 2)), 0.7, qumode))
        assert_unitary(gate_matrix(Gate(GateKind.CONTROLLED_GIVENS_QUDIT, (1, 2), level=2), 0.7, qudit))

    def test_batch_matches_columns(self, rng):
        layout = make_layout('qubit', n_orb=1, n_b_max=2)
        gates = [
            Gate(GateKind.CONTROLLED_GIVENS_QUBIT, (0, 3, 2), slot=0),
            Gate(GateKind.RY, (1,), slot=1),
            Gate(GateKind.CX, (1, 4)),
        ]
        params = [0.3, -1.1]
        states = random_state(rng, layout.dim, k=3)
        batch = apply_gates(states, gates, params, layout)
        for j in range(3):
            np.testing.assert_allclose(batch[:, j], apply_gates(states[:, j], gates, params, layout), atol=1e-14)

    def test_displacement_tail_warning(self, caplog):
        layout = make_layout('qumode', n_orb=1, n_cut=3)
        vacuum = basis_state(layout.dim, 0)
        with caplog.at_level(logging.WARNING, logger='Polariton.Simulator'):
            out = apply_displacement(vacuum, 1.0, layout)
        assert fock_tail_weight(out, layout) > 1e-8
        assert any('Coherent tail' in r.message for r in caplog.records)

    def test_small_displacement_is_quiet(self, caplog):
        layout = make_layout('qumode', n_orb=1, n_cut=15)
        with caplog.at_level(logging.WARNING, logger='Polariton.Simulator'):
            apply_displacement(basis_state(layout.dim, 0), 0.05, layout)
        assert not caplog.records

    def test_displacement_needs_qumode(self):
        layout = make_layout('qudit', n_orb=1, n_b_max=3)
        with pytest.raises(LayoutError):
            apply_displacement(basis_state(layout.dim, 0), 0.1, layout)

    def test_one_hot_leakage(self):
        layout = make_layout('qubit', n_orb=1, n_b_max=1)
        valid = basis_state(layout.dim, layout.photon_code(0))
        invalid = basis_state(layout.dim, 0)
        assert one_hot_leakage(valid, layout) == pytest.approx(0.0)
        assert one_hot_leakage(invalid, layout) == pytest.approx(1.0)

    def test_state_dimension_checked(self):
        layout = make_layout('qubit', n_orb=1, n_b_max=1)
        with pytest.raises(LayoutError):
            apply(np.ones(3), Gate(GateKind.X, (0,)), 0.0, layout)


class TestValidation:

    @pytest.fixture
    def qudit(self):
        return make_layout('qudit', n_orb=2, n_b_max=3)

    def test_repeated_site(self):
        with pytest.raises(GateDefinitionError):
            Gate(GateKind.CX, (1, 1))

    def test_negative_slot(self):
        with pytest.raises(GateDefinitionError):
            Gate(GateKind.RY, (0,), slot=-1)

    def test_missing_parameters(self):
        with pytest.raises(GateDefinitionError):
            Gate(GateKind.RY, (0,), slot=0).resolve(None)

    def test_site_outside_register(self, qudit):
        with pytest.raises(GateDefinitionError):
            gate_matrix(Gate(GateKind.X, (5,)), 0.0, qudit)

    def test_wrong_site_count(self, qudit):
        with pytest.raises(GateDefinitionError):
            gate_matrix(Gate(GateKind.CX, (0, 1, 2)), 0.0, qudit)
        with pytest.raises(GateDefinitionError):
            gate_matrix(Gate(GateKind.CONTROLLED_GIVENS_QUDIT, (4,)), 0.0, qudit)

    def test_qubit_gate_on_qudit_site(self, qudit):
        with pytest.raises(LayoutError):
            gate_matrix(Gate(GateKind.CX, (0, 4)), 0.0, qudit)

    def test_fabric_must_start_on_an_orbital(self, qudit):
        with pytest.raises(LayoutError):
            gate_matrix(Gate(GateKind.FABRIC_SINGLE, (1, 2, 3, 0)), 0.0, qudit)

    def test_mode_gate_on_fermion_site(self):
        qumode = make_layout('qumode', n_orb=1, n_cut=3)
        with pytest.raises(LayoutError):
            gate_matrix(Gate(GateKind.CONTROLLED_DISPLACEMENT, (0, 1)), 0.1, qumode)

    def test_platform_mismatch(self, qudit):
        with pytest.raises(LayoutError):
            gate_matrix(Gate(GateKind.DISPLACEMENT, (4,)), 0.1, qudit)
