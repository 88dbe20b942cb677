"""Tests for the s-Gaussian integral engine and RHF."""

import math

import numpy as np
import pytest
from scipy.linalg import eigvalsh

from src.config import ANGSTROM_TO_BOHR
from src.core.errors import ConvergenceError, DomainError, SingularGeometryError, UnsupportedBasisError
from src.core.integrals import (
    Atom,
    Geometry,
    Shell,
    boys_f0,
    compute_ao_integrals,
    h2_geometry,
    h2_integrals,
    load_basis,
    run_rhf,
)
from src.core.qedfci import CavitySpec, polaritonic_states


def two_by_two_fci(mi):
    """Ground state of the {|σ_g²>, |σ_u²>} CI problem."""
    h, g = mi.h, mi.g
    H = np.array([
        [2 * h[0, 0] + g[0, 0, 0, 0], g[0, 1, 0, 1]],
        [g[0, 1, 0, 1], 2 * h[1, 1] + g[1, 1, 1, 1]],
    ])
    return eigvalsh(H)[0] + mi.e_nuc


class TestBoysFunction:

    def test_zero(self):
        assert boys_f0(0.0) == pytest.approx(1.0)

    def test_small_argument_series(self):
        assert boys_f0(1e-12) == pytest.approx(1.0 - 1e-12 / 3.0, abs=1e-15)

    def test_large_argument(self):
        t = 30.0
        assert boys_f0(t) == pytest.approx(0.5 * math.sqrt(math.pi / t), rel=1e-12)

    def test_vectorized(self):
        values = boys_f0(np.array([0.0, 1.0, 30.0]))
        assert values.shape == (3,)
        assert np.all(np.diff(values) < 0)


class TestAOIntegrals:

    @pytest.fixture(scope='class')
    def ao(self):
        geometry = h2_geometry(1.4)
        return compute_ao_integrals(geometry, load_basis(geometry))

    def test_normalized_overlap(self, ao):
        np.testing.assert_allclose(np.diag(ao.overlap), 1.0, atol=1e-12)

    def test_reference_values_at_1_4_bohr(self, ao):
        # minimal-basis textbook values at R = 1.4 bohr
        assert ao.overlap[0, 1] == pytest.approx(0.6593, abs=2e-4)
        assert ao.kinetic[0, 0] == pytest.approx(0.7600, abs=2e-4)
        assert ao.kinetic[0, 1] == pytest.approx(0.2365, abs=2e-4)
        assert ao.eri[0, 0, 0, 0] == pytest.approx(0.7746, abs=2e-4)
        assert ao.eri[0, 0, 1, 1] == pytest.approx(0.5697, abs=2e-4)
        assert ao.eri[1, 0, 1, 0] == pytest.approx(0.2970, abs=2e-4)
        assert ao.eri[1, 0, 0, 0] == pytest.approx(0.4441, abs=2e-4)

    def test_eri_permutational_symmetry(self, ao):
        g = ao.eri
        np.testing.assert_allclose(g, g.transpose(1, 0, 2, 3), atol=1e-14)
        np.testing.assert_allclose(g, g.transpose(2, 3, 0, 1), atol=1e-14)

    def test_nuclear_repulsion(self, ao):
        assert ao.e_nuc == pytest.approx(1 / 1.4)

    def test_coincident_nuclei(self):
        geometry = Geometry(atoms=(Atom('H', 1.0, (0.0, 0.0, 0.0)), Atom('H', 1.0, (0.0, 0.0, 0.0))))
        with pytest.raises(SingularGeometryError):
            compute_ao_integrals(geometry, load_basis(geometry))

    def test_non_positive_bond_length(self):
        with pytest.raises(DomainError):
            h2_geometry(0.0)

    def test_p_shells_rejected(self):
        with pytest.raises(UnsupportedBasisError):
            Shell(center=(0.0, 0.0, 0.0), exponents=(1.0,), coefficients=(1.0,), angular_momentum=1)

    def test_scf_cycle_cap(self, ao):
        with pytest.raises(ConvergenceError):
            run_rhf(ao, 2, max_cycles=2, tolerance=0.0)


class TestH2Integrals:

    def test_nuclear_repulsion(self, h2):
        assert h2.e_nuc == pytest.approx(1.0 / (0.74 * ANGSTROM_TO_BOHR), rel=1e-12)

    def test_hartree_fock_energy(self, h2):
        assert h2.e_hf == pytest.approx(-1.1167, abs=1e-3)

    def test_fci_energy_matches_two_determinant_ci(self, h2):
        e_fci = two_by_two_fci(h2)
        assert e_fci == pytest.approx(-1.1373, abs=1e-3)

        bare = CavitySpec(omega=1.0, coupling=0.0, n_b_max=0)
        spectrum, _ = polaritonic_states(h2, bare, k=1, spin='any')
        assert spectrum.energies[0] == pytest.approx(e_fci, abs=1e-10)

    def test_hf_energy_from_mo_integrals(self, h2):
        e = 2 * h2.h[0, 0] + h2.g[0, 0, 0, 0] + h2.e_nuc
        assert e == pytest.approx(h2.e_hf, abs=1e-10)

    def test_symmetric_molecule_has_no_permanent_dipole(self, h2):
        np.testing.assert_allclose(h2.dipole_nuc, 0.0, atol=1e-14)
        np.testing.assert_allclose(np.diagonal(h2.dipole_e, axis1=1, axis2=2), 0.0, atol=1e-10)

    def test_transition_dipole_follows_the_bond(self, h2, h2_perpendicular):
        along, across = h2.dipole_e, h2_perpendicular.dipole_e
        assert abs(along[2, 0, 1]) > 0.1
        np.testing.assert_allclose(across[2], 0.0, atol=1e-14)
        assert abs(across[0, 0, 1]) == pytest.approx(abs(along[2, 0, 1]), abs=1e-10)

    def test_energy_is_orientation_independent(self, h2):
        tilted = h2_integrals(0.74, 0.7)
        assert tilted.e_hf == pytest.approx(h2.e_hf, abs=1e-10)

    def test_metadata(self, h2):
        assert h2.metadata['molecule'] == 'H2'
        assert h2.metadata['basis'] == 'STO-3G'
        assert h2.n_orb == 2 and h2.n_electrons == 2
