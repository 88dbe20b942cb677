"""
Operator mappings onto platform registers.

Fermions use Jordan-Wigner on 2·n_orb qubits, spin-orbitals interleaved as
(p↑, p↓) and qubit 0 most significant. The photon mode goes to one of three
bosonic registers: N_B+1 one-hot qubits, one d-level qudit, or one Fock
qumode. The full register is fermion qubits first, then the bosonic sites.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Dict, List, Sequence

import numpy as np

from src.core.errors import ConfigurationError, DomainError, LayoutError

logger = logging.getLogger('Polariton.Mappings')

PAULI = {
    'I': np.eye(2, dtype=complex),
    'X': np.array([[0, 1], [1, 0]], dtype=complex),
    'Y': np.array([[0, -1j], [1j, 0]], dtype=complex),
    'Z': np.array([[1, 0], [0, -1]], dtype=complex),
}


# =============================================================================
# REGISTER LAYOUT
# =============================================================================

@dataclass(frozen=True)
class RegisterLayout:
    """
    Site description of a platform register.

    n_photon_levels is the number of physical photon states the bosonic part
    can hold: N_B+1 for qubit and qudit registers, n_cut+1 for a qumode.
    """
    platform: str
    n_ferm: int
    n_photon_levels: int

    def __post_init__(self):
        if self.platform not in ('qubit', 'qudit', 'qumode'):
            raise LayoutError(f"Unknown platform '{self.platform}'")
        if self.n_ferm < 1 or self.n_ferm % 2:
            raise LayoutError(f"Fermionic qubit count must be even and positive, got {self.n_ferm}")
        if self.n_photon_levels < 1:
            raise LayoutError("Need at least one photon level")
        if self.platform == 'qumode' and self.n_photon_levels < 2:
            raise LayoutError("Qumode cutoff must be at least 1")

    @property
    def n_orb(self) -> int:
        return self.n_ferm // 2

    @property
    def photon_cutoff(self) -> int:
        return self.n_photon_levels - 1

    @property
    def boson_dims(self) -> List[int]:
        if self.platform == 'qubit':
            return [2] * self.n_photon_levels
        return [self.n_photon_levels]

    @property
    def site_dims(self) -> List[int]:
        return [2] * self.n_ferm + self.boson_dims

    @property
    def boson_sites(self) -> List[int]:
        return list(range(self.n_ferm, self.n_ferm + len(self.boson_dims)))

    @property
    def fermion_dim(self) -> int:
        return 2 ** self.n_ferm

    @property
    def boson_dim(self) -> int:
        return int(np.prod(self.boson_dims))

    @property
    def dim(self) -> int:
        return self.fermion_dim * self.boson_dim

    def photon_code(self, n: int) -> int:
        """Index in the bosonic register of the n-photon state."""
        if not 0 <= n < self.n_photon_levels:
            raise LayoutError(f"Photon number {n} outside 0..{self.photon_cutoff}")
        if self.platform == 'qubit':
            # one-hot: boson qubit n set, qubit 0 most significant
            return 1 << (self.n_photon_levels - 1 - n)
        return n

    def boson_site_of(self, n: int) -> int:
        """Register site of the one-hot qubit that flags n photons."""
        if self.platform != 'qubit':
            raise LayoutError("Only the qubit platform has one site per photon number")
        return self.n_ferm + n

    def to_dict(self) -> Dict:
        return {
            'platform': self.platform,
            'n_ferm': self.n_ferm,
            'n_photon_levels': self.n_photon_levels,
            'site_dims': self.site_dims,
        }


def make_layout(platform: str, n_orb: int = 2, n_b_max: int = 3, n_cut: int = 15) -> RegisterLayout:
    """Layout for a platform; qumode uses n_cut, the others n_b_max."""
    levels = n_cut + 1 if platform == 'qumode' else n_b_max + 1
    return RegisterLayout(platform=platform, n_ferm=2 * n_orb, n_photon_levels=levels)


# =============================================================================
# PAULI TERMS
# =============================================================================

@dataclass(frozen=True)
class PauliTerm:
    coefficient: complex
    letters: str

    def __post_init__(self):
        if any(c not in PAULI for c in self.letters):
            raise DomainError(f"Invalid Pauli string '{self.letters}'")

    def matrix(self) -> np.ndarray:
        return self.coefficient * reduce(np.kron, [PAULI[c] for c in self.letters])


def pauli_sum_matrix(terms: Sequence[PauliTerm]) -> np.ndarray:
    if not terms:
        raise DomainError("Empty Pauli sum")
    return sum(term.matrix() for term in terms)


def _site_product(factors: Dict[int, List[PauliTerm]], n_qubits: int) -> List[PauliTerm]:
    """Expand a product of single-site Pauli sums into PauliTerms."""
    terms = [PauliTerm(1.0, 'I' * n_qubits)]
    for site, options in sorted(factors.items()):
        expanded = []
        for term in terms:
            for option in options:
                letters = term.letters[:site] + option.letters + term.letters[site + 1:]
                expanded.append(PauliTerm(term.coefficient * option.coefficient, letters))
        terms = expanded
    return terms


RAISE = [PauliTerm(0.5, 'X'), PauliTerm(-0.5j, 'Y')]    # |1><0|
LOWER = [PauliTerm(0.5, 'X'), PauliTerm(0.5j, 'Y')]     # |0><1|


# =============================================================================
# FERMIONS (JORDAN-WIGNER)
# =============================================================================

def spin_orbital(p: int, spin: int) -> int:
    """Qubit index of spatial orbital p with spin 0 (↑) or 1 (↓)."""
    return 2 * p + spin


def jw_creation(p: int, n_qubits: int) -> List[PauliTerm]:
    """a†_p -> Z_0 … Z_{p-1} (X_p - iY_p)/2."""
    if not 0 <= p < n_qubits:
        raise DomainError(f"Spin-orbital {p} outside 0..{n_qubits - 1}")
    factors = {q: [PauliTerm(1.0, 'Z')] for q in range(p)}
    factors[p] = RAISE
    return _site_product(factors, n_qubits)


def jw_annihilation(p: int, n_qubits: int) -> List[PauliTerm]:
    return [PauliTerm(np.conj(t.coefficient), t.letters) for t in jw_creation(p, n_qubits)]


@lru_cache(maxsize=16)
def _creation_matrices(n_qubits: int):
    return tuple(pauli_sum_matrix(jw_creation(p, n_qubits)) for p in range(n_qubits))


def creation_matrices(n_qubits: int) -> List[np.ndarray]:
    """Dense a†_p matrices for every spin-orbital p."""
    return [m.copy() for m in _creation_matrices(n_qubits)]


def excitation_matrices(n_qubits: int) -> np.ndarray:
    """Spin-free E_pq = Σ_σ a†_pσ a_qσ, shape (n_orb, n_orb, dim, dim)."""
    cre = _creation_matrices(n_qubits)
    n_orb = n_qubits // 2
    dim = 2 ** n_qubits
    E = np.zeros((n_orb, n_orb, dim, dim), dtype=complex)
    for p in range(n_orb):
        for q in range(n_orb):
            for s in (0, 1):
                E[p, q] += cre[spin_orbital(p, s)] @ cre[spin_orbital(q, s)].conj().T
    return E


def fermion_spin_operators(n_qubits: int) -> Dict[str, np.ndarray]:
    """N_e, S_z, S+, S- and S² on the fermionic register."""
    cre = _creation_matrices(n_qubits)
    n_orb = n_qubits // 2
    dim = 2 ** n_qubits
    number = np.zeros((dim, dim), dtype=complex)
    s_z = np.zeros((dim, dim), dtype=complex)
    s_plus = np.zeros((dim, dim), dtype=complex)
    for p in range(n_orb):
        up, down = cre[spin_orbital(p, 0)], cre[spin_orbital(p, 1)]
        n_up = up @ up.conj().T
        n_down = down @ down.conj().T
        number += n_up + n_down
        s_z += 0.5 * (n_up - n_down)
        s_plus += up @ down.conj().T
    s_minus = s_plus.conj().T
    s2 = s_minus @ s_plus + s_z + s_z @ s_z
    return {'N': number, 'Sz': s_z, 'S+': s_plus, 'S-': s_minus, 'S2': s2}


# =============================================================================
# BOSONS
# =============================================================================

def boson_creation_qubit(n_b_max: int) -> List[PauliTerm]:
    """b† -> Σ_q √(q+1) |1><0|_{q+1} |0><1|_q on N_B+1 one-hot qubits."""
    if n_b_max < 1:
        raise DomainError(f"One-hot boson map needs n_b_max >= 1, got {n_b_max}")
    n_qubits = n_b_max + 1
    terms = []
    for q in range(n_b_max):
        pair = _site_product({q: LOWER, q + 1: RAISE}, n_qubits)
        terms.extend(PauliTerm(np.sqrt(q + 1) * t.coefficient, t.letters) for t in pair)
    return terms


def gell_mann(d: int, l: int, lp: int, kind: str) -> np.ndarray:
    """Generalized Gell-Mann Λ^X or Λ^Y between levels l < l'."""
    if not 0 <= l < lp < d:
        raise DomainError(f"Need 0 <= l < l' < d, got l={l}, l'={lp}, d={d}")
    m = np.zeros((d, d), dtype=complex)
    if kind == 'X':
        m[l, lp] = m[lp, l] = 1.0
    elif kind == 'Y':
        m[l, lp] = -1j
        m[lp, l] = 1j
    else:
        raise DomainError(f"Gell-Mann kind must be X or Y, got {kind}")
    return m


def boson_creation_qudit(d: int) -> np.ndarray:
    """b† = Σ_l (√(l+1)/2)(Λ^X_{l,l+1} - iΛ^Y_{l,l+1})."""
    if d < 2:
        raise DomainError(f"Qudit dimension must be >= 2, got {d}")
    return sum(
        0.5 * np.sqrt(l + 1) * (gell_mann(d, l, l + 1, 'X') - 1j * gell_mann(d, l, l + 1, 'Y'))
        for l in range(d - 1)
    )


def boson_ops_qumode(n_cut: int):
    """Truncated (b†, b) on Fock levels 0..n_cut."""
    if n_cut < 1:
        raise DomainError(f"Fock cutoff must be >= 1, got {n_cut}")
    bdag = np.diag(np.sqrt(np.arange(1, n_cut + 1)), k=-1).astype(complex)
    return bdag, bdag.conj().T


def boson_creation(layout: RegisterLayout) -> np.ndarray:
    """Mapped b† on the full bosonic register of a layout."""
    if layout.platform == 'qubit':
        if layout.photon_cutoff == 0:
            return np.zeros((2, 2), dtype=complex)
        return pauli_sum_matrix(boson_creation_qubit(layout.photon_cutoff))
    if layout.platform == 'qudit':
        if layout.n_photon_levels == 1:
            return np.zeros((1, 1), dtype=complex)
        return boson_creation_qudit(layout.n_photon_levels)
    return boson_ops_qumode(layout.photon_cutoff)[0]


# =============================================================================
# LIFTING AND SUBSPACES
# =============================================================================

def lift_fermionic(op: np.ndarray, layout: RegisterLayout) -> np.ndarray:
    return np.kron(op, np.eye(layout.boson_dim))


def lift_bosonic(op: np.ndarray, layout: RegisterLayout) -> np.ndarray:
    return np.kron(np.eye(layout.fermion_dim), op)


def register_operators(layout: RegisterLayout) -> Dict[str, np.ndarray]:
    """Spin, electron-number and photon-number operators on the full register."""
    ops = {name: lift_fermionic(m, layout) for name, m in fermion_spin_operators(layout.n_ferm).items()}
    bdag = boson_creation(layout)
    ops['photons'] = lift_bosonic(bdag @ bdag.conj().T, layout)
    return ops


def physical_subspace(layout: RegisterLayout, n_electrons: int, n_levels: int = None) -> np.ndarray:
    """
    Register indices of N_e-electron states with a valid photon encoding.

    Ordered determinant-major (ascending bitstring) with photon number fastest,
    which is the HybridBasis order.
    """
    n_levels = layout.n_photon_levels if n_levels is None else min(n_levels, layout.n_photon_levels)
    dets = [d for d in range(layout.fermion_dim) if bin(d).count('1') == n_electrons]
    codes = [layout.photon_code(n) for n in range(n_levels)]
    return np.array([d * layout.boson_dim + c for d in dets for c in codes], dtype=int)


# =============================================================================
# PLATFORM HAMILTONIAN
# =============================================================================

def assemble_platform_hamiltonian(mi, cav, layout: RegisterLayout):
    """
    Pauli-Fierz Hamiltonian mapped term by term onto a platform register.

    Args:
        mi: MolecularIntegrals with dipoles
        cav: CavitySpec whose n_b_max matches the layout cutoff
        layout: Target register

    Returns:
        Hermitian OperatorMatrix on the whole register
    """
    from src.core.qedfci import OperatorMatrix, dipole_matrix

    if cav.n_b_max != layout.photon_cutoff:
        raise ConfigurationError(
            f"Cavity cutoff {cav.n_b_max} does not match {layout.platform} register "
            f"cutoff {layout.photon_cutoff}")
    if layout.n_ferm != 2 * mi.n_orb:
        raise ConfigurationError(
            f"{layout.n_ferm} fermionic qubits cannot hold {mi.n_orb} spatial orbitals")

    E = excitation_matrices(layout.n_ferm)
    n = mi.n_orb
    dim_f = layout.fermion_dim
    h_e = mi.e_nuc * np.eye(dim_f, dtype=complex)
    h_e += np.einsum('pq,pqij->ij', mi.h, E)
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    if mi.g[p, q, r, s] == 0.0:
                        continue
                    term = E[p, q] @ E[r, s]
                    if q == r:
                        term = term - E[p, s]
                    h_e += 0.5 * mi.g[p, q, r, s] * term

    # the nuclear term sits on E_pp, so it is exact only in the N_e-electron sector
    lam_d = np.einsum('pq,pqij->ij', dipole_matrix(mi, cav), E)

    bdag = boson_creation(layout)
    b = bdag.conj().T
    coupling = lift_fermionic(lam_d, layout)
    H = (lift_fermionic(h_e, layout)
         + cav.omega * lift_bosonic(bdag @ b, layout)
         - np.sqrt(cav.omega / 2.0) * coupling @ lift_bosonic(bdag + b, layout)
         + 0.5 * coupling @ coupling)

    logger.debug(f"Platform Hamiltonian ({layout.platform}): dim={layout.dim}")
    return OperatorMatrix(0.5 * (H + H.conj().T), hermitian=True, label=f'H_PF[{layout.platform}]')
