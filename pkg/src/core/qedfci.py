"""
QED-FCI oracle: exact diagonalization of the Pauli-Fierz Hamiltonian in the
Slater-determinant ⊗ photon-number basis.

Determinants are bit strings over 2·n_orb spin-orbitals (interleaved ↑/↓,
spin-orbital 0 most significant) in ascending order. Photon number is the
fastest index, so at λ = 0 each determinant's photon ladder is contiguous.
Second-quantized actions are evaluated here by direct bit counting; the
register mappings build the same operators from Pauli strings, and the two
are cross-checked in the tests.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import brentq

from src.config import Config
from src.core.errors import (
    AbsentDipoleError,
    CapacityError,
    DomainError,
    ShapeError,
)
from src.core.integrals import MolecularIntegrals

logger = logging.getLogger('Polariton.QEDFCI')

DEGENERACY_TOL = 1e-8
MONOTONE_TOL = 1e-10


# =============================================================================
# DOMAIN TYPES
# =============================================================================

@dataclass(frozen=True)
class CavitySpec:
    omega: float
    coupling: float
    polarization: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    n_b_max: int = 3

    def __post_init__(self):
        if self.omega <= 0:
            raise DomainError(f"Cavity frequency must be positive, got {self.omega}")
        if self.coupling < 0:
            raise DomainError(f"Coupling must be non-negative, got {self.coupling}")
        if abs(np.linalg.norm(self.polarization) - 1.0) > 1e-12:
            raise DomainError(f"Polarization {self.polarization} is not a unit vector")
        if self.n_b_max < 0:
            raise DomainError(f"Photon cutoff must be >= 0, got {self.n_b_max}")

    @property
    def coupling_vector(self) -> np.ndarray:
        return self.coupling * np.asarray(self.polarization, dtype=float)

    def with_cutoff(self, n_b_max: int) -> 'CavitySpec':
        return replace(self, n_b_max=n_b_max)

    def to_dict(self) -> Dict:
        return {
            'omega': self.omega,
            'lambda': self.coupling,
            'polarization': list(self.polarization),
            'n_b_max': self.n_b_max,
        }


@dataclass
class HybridBasis:
    n_orb: int
    n_electrons: int
    n_b_max: int
    determinants: List[int]
    index: Dict[Tuple[int, int], int] = field(repr=False, default_factory=dict)

    @property
    def n_spin_orbitals(self) -> int:
        return 2 * self.n_orb

    @property
    def n_photon_levels(self) -> int:
        return self.n_b_max + 1

    @property
    def n_determinants(self) -> int:
        return len(self.determinants)

    @property
    def size(self) -> int:
        return self.n_determinants * self.n_photon_levels

    def state(self, position: int) -> Tuple[int, int]:
        """(determinant bits, photon number) at a basis position."""
        det, n = divmod(position, self.n_photon_levels)
        return self.determinants[det], n

    def position(self, determinant: int, photons: int) -> int:
        return self.index[(determinant, photons)]

    def bitstring(self, determinant: int) -> str:
        return format(determinant, f'0{self.n_spin_orbitals}b')


@dataclass
class OperatorMatrix:
    matrix: np.ndarray
    hermitian: bool = True
    label: str = ''

    def __post_init__(self):
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError(f"Operator must be square, got {m.shape}")
        if self.hermitian:
            scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
            if np.max(np.abs(m - m.conj().T)) > 1e-12 * scale:
                raise DomainError(f"Operator {self.label or ''} flagged hermitian is not")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other):
        return self.matrix @ other


@dataclass
class Spectrum:
    energies: np.ndarray
    vectors: np.ndarray  # columns

    def __post_init__(self):
        if self.vectors.shape[1] != len(self.energies):
            raise ShapeError("Eigenvector count does not match eigenvalue count")

    @property
    def k(self) -> int:
        return len(self.energies)

    def state(self, i: int) -> np.ndarray:
        return self.vectors[:, i]


# =============================================================================
# BASIS
# =============================================================================

def build_hybrid_basis(n_orb: int, n_electrons: int, n_b_max: int, cap: Optional[int] = None) -> HybridBasis:
    n_so = 2 * n_orb
    if n_orb < 1 or not 0 <= n_electrons <= n_so:
        raise DomainError(f"Need 0 <= n_e <= 2·n_orb, got n_e={n_electrons}, n_orb={n_orb}")
    if n_b_max < 0:
        raise DomainError(f"Photon cutoff must be >= 0, got {n_b_max}")

    cap = Config.BASIS_CAP if cap is None else cap
    size = math.comb(n_so, n_electrons) * (n_b_max + 1)
    if size > cap:
        raise CapacityError(size, cap)

    determinants = sorted(
        sum(1 << (n_so - 1 - k) for k in occupied)
        for occupied in combinations(range(n_so), n_electrons)
    )
    basis = HybridBasis(n_orb, n_electrons, n_b_max, determinants)
    basis.index = {(d, n): i * (n_b_max + 1) + n
                   for i, d in enumerate(determinants) for n in range(n_b_max + 1)}
    return basis


# =============================================================================
# DETERMINANT-SPACE OPERATORS (bit counting)
# =============================================================================

def _occupied(det: int, k: int, n_so: int) -> bool:
    return bool(det >> (n_so - 1 - k) & 1)


def _apply_hop(det: int, p: int, q: int, n_so: int) -> Tuple[int, int]:
    """a†_p a_q on a determinant; returns (new determinant, sign) or (0, 0)."""
    if not _occupied(det, q, n_so):
        return 0, 0
    sign = (-1) ** sum(_occupied(det, k, n_so) for k in range(q))
    det ^= 1 << (n_so - 1 - q)
    if _occupied(det, p, n_so):
        return 0, 0
    sign *= (-1) ** sum(_occupied(det, k, n_so) for k in range(p))
    det |= 1 << (n_so - 1 - p)
    return det, sign


def _one_body(basis: HybridBasis, M: np.ndarray) -> np.ndarray:
    """Σ_kl M_kl a†_k a_l on the determinant space (spin-orbital M)."""
    n_so = basis.n_spin_orbitals
    lookup = {d: i for i, d in enumerate(basis.determinants)}
    dim = basis.n_determinants
    out = np.zeros((dim, dim), dtype=complex)
    for j, det in enumerate(basis.determinants):
        for k in range(n_so):
            for l in range(n_so):
                if M[k, l] == 0:
                    continue
                new, sign = _apply_hop(det, k, l, n_so)
                if sign:
                    out[lookup[new], j] += sign * M[k, l]
    return out


def _spin_free(M_spatial: np.ndarray) -> np.ndarray:
    return np.kron(M_spatial, np.eye(2))


def excitation_operator(basis: HybridBasis, p: int, q: int) -> np.ndarray:
    """Spin-free E_pq on the determinant space."""
    unit = np.zeros((basis.n_orb, basis.n_orb))
    unit[p, q] = 1.0
    return _one_body(basis, _spin_free(unit))


def _excitations(basis: HybridBasis) -> np.ndarray:
    n = basis.n_orb
    return np.array([[excitation_operator(basis, p, q) for q in range(n)] for p in range(n)])


def electronic_hamiltonian(mi: MolecularIntegrals, basis: HybridBasis) -> np.ndarray:
    """H_e = Σ h_pq E_pq + ½ Σ g_pqrs (E_pq E_rs - δ_qr E_ps) + E_nuc."""
    E = _excitations(basis)
    n = mi.n_orb
    H = mi.e_nuc * np.eye(basis.n_determinants, dtype=complex)
    H += np.einsum('pq,pqij->ij', mi.h, E)
    H += 0.5 * np.einsum('pqrs,pqij,rsjk->ik', mi.g, E, E, optimize=True)
    H -= 0.5 * np.einsum('pqqs,psij->ij', mi.g, E)
    return H


def dipole_matrix(mi: MolecularIntegrals, cav: CavitySpec) -> np.ndarray:
    """Spatial-orbital λ·d with the nuclear part spread as δ_pq (λ·d_nuc)/N_e."""
    if not mi.has_dipole:
        raise AbsentDipoleError("Pauli-Fierz coupling needs dipole integrals")
    lam = cav.coupling_vector
    d = np.einsum('c,cpq->pq', lam, mi.dipole_e)
    if mi.n_electrons:
        d = d + np.eye(mi.n_orb) * float(lam @ mi.dipole_nuc) / mi.n_electrons
    return d


def _lift_electronic(A: np.ndarray, basis: HybridBasis) -> np.ndarray:
    return np.kron(A, np.eye(basis.n_photon_levels))


def _lift_photonic(B: np.ndarray, basis: HybridBasis) -> np.ndarray:
    return np.kron(np.eye(basis.n_determinants), B)


def _ladder(n_b_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_b_max + 1)), k=-1).astype(complex)


# =============================================================================
# OPERATORS ON THE HYBRID BASIS
# =============================================================================

def build_pauli_fierz(mi: MolecularIntegrals, cav: CavitySpec, basis: HybridBasis) -> OperatorMatrix:
    """H = H_e + ω b†b - √(ω/2)(λ·d)(b†+b) + ½(λ·d)²."""
    if not mi.has_dipole:
        raise AbsentDipoleError("Pauli-Fierz Hamiltonian needs dipole integrals")
    if basis.n_orb != mi.n_orb or basis.n_electrons != mi.n_electrons:
        raise ShapeError(
            f"Basis ({basis.n_orb} orb, {basis.n_electrons} e) does not match integrals "
            f"({mi.n_orb} orb, {mi.n_electrons} e)")
    if cav.n_b_max != basis.n_b_max:
        raise ShapeError(f"Cavity cutoff {cav.n_b_max} differs from basis cutoff {basis.n_b_max}")

    bdag = _ladder(basis.n_b_max)
    b = bdag.conj().T
    lam_d = _lift_electronic(_one_body(basis, _spin_free(dipole_matrix(mi, cav))), basis)

    H = (_lift_electronic(electronic_hamiltonian(mi, basis), basis)
         + cav.omega * _lift_photonic(bdag @ b, basis)
         - math.sqrt(cav.omega / 2.0) * lam_d @ _lift_photonic(bdag + b, basis)
         + 0.5 * lam_d @ lam_d)
    return OperatorMatrix(0.5 * (H + H.conj().T), hermitian=True, label='H_PF')


def photon_number_operator(basis: HybridBasis) -> OperatorMatrix:
    return OperatorMatrix(_lift_photonic(np.diag(np.arange(basis.n_photon_levels)).astype(complex), basis),
                          label='b†b')


def photon_projector(basis: HybridBasis, n: int) -> OperatorMatrix:
    if not 0 <= n <= basis.n_b_max:
        raise DomainError(f"Photon number {n} outside 0..{basis.n_b_max}")
    P = np.zeros((basis.n_photon_levels,) * 2, dtype=complex)
    P[n, n] = 1.0
    return OperatorMatrix(_lift_photonic(P, basis), label=f'P_{n}')


def spin_operators(basis: HybridBasis) -> Dict[str, OperatorMatrix]:
    """N_e, S_z, S², S+ and S- lifted to the hybrid basis."""
    n_so = basis.n_spin_orbitals
    number = np.eye(n_so)
    s_z = np.diag([0.5 if k % 2 == 0 else -0.5 for k in range(n_so)])
    s_plus = np.zeros((n_so, n_so))
    for p in range(basis.n_orb):
        s_plus[2 * p, 2 * p + 1] = 1.0

    Sz = _one_body(basis, s_z)
    Sp = _one_body(basis, s_plus)
    Sm = Sp.conj().T
    S2 = Sm @ Sp + Sz + Sz @ Sz
    lift = lambda A: _lift_electronic(A, basis)
    return {
        'N': OperatorMatrix(lift(_one_body(basis, number)), label='N_e'),
        'Sz': OperatorMatrix(lift(Sz), label='S_z'),
        'S2': OperatorMatrix(lift(S2), label='S^2'),
        'S+': OperatorMatrix(lift(Sp), hermitian=False, label='S+'),
        'S-': OperatorMatrix(lift(Sm), hermitian=False, label='S-'),
    }


def hybrid_excitation(basis: HybridBasis, p: int, q: int) -> OperatorMatrix:
    return OperatorMatrix(_lift_electronic(excitation_operator(basis, p, q), basis),
                          hermitian=(p == q), label=f'E_{p}{q}')


def hybrid_dipole(mi: MolecularIntegrals, cav: CavitySpec, basis: HybridBasis) -> OperatorMatrix:
    """λ·d on the hybrid basis (electronic plus nuclear)."""
    return OperatorMatrix(_lift_electronic(_one_body(basis, _spin_free(dipole_matrix(mi, cav))), basis),
                          label='λ·d')


def singlet_subspace(basis: HybridBasis) -> np.ndarray:
    """Orthonormal columns spanning the S² = 0 eigenspace."""
    w, v = eigh(spin_operators(basis)['S2'].matrix)
    return v[:, np.abs(w) < 1e-8]


# =============================================================================
# DIAGONALIZATION
# =============================================================================

def _phase_fix(v: np.ndarray) -> np.ndarray:
    """Rotate so the largest-magnitude entry is real and positive."""
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def align_degenerate(V: np.ndarray, candidates: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Canonical basis for the span of V (columns).

    With candidates, take their projections in order (Gram-Schmidt) and phase
    each so its overlap with the candidate is positive. Without, greedily pick
    the unit vector with the largest projection, lowest index on ties.
    """
    c = V.shape[1]
    P = V @ V.conj().T
    chosen: List[np.ndarray] = []

    def project(x):
        w = P @ x
        for u in chosen:
            w = w - u * np.vdot(u, w)
        return w

    if candidates is not None:
        for x in list(candidates.T) + list(V.T):
            if len(chosen) == c:
                break
            w = project(x)
            norm = np.linalg.norm(w)
            if norm > 1e-6:
                w = w / norm
                overlap = np.vdot(x, w)
                if abs(overlap) > 1e-12:
                    w = w * (abs(overlap) / overlap)
                chosen.append(w)
    else:
        while len(chosen) < c:
            residual = P - sum(np.outer(u, u.conj()) for u in chosen) if chosen else P
            weights = np.real(np.diag(residual))
            i = int(np.argmax(np.round(weights, 12)))
            unit = np.zeros(V.shape[0], dtype=complex)
            unit[i] = 1.0
            w = project(unit)
            chosen.append(_phase_fix(w / np.linalg.norm(w)))

    return np.column_stack(chosen)


def _clusters(energies: np.ndarray, tol: float) -> List[List[int]]:
    groups = [[0]] if len(energies) else []
    for i in range(1, len(energies)):
        if energies[i] - energies[groups[-1][-1]] < tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def diagonalize(
    h: OperatorMatrix,
    k: int,
    subspace: Optional[np.ndarray] = None,
    reference: Optional[np.ndarray] = None
) -> Spectrum:
    """
    k lowest eigenpairs, optionally restricted to the span of `subspace`.

    Degenerate clusters are resolved against `reference` (columns) when given,
    otherwise by the basis index of the largest amplitude.
    """
    if not h.hermitian:
        raise DomainError("diagonalize needs a hermitian operator")
    M = h.matrix
    Q = None
    if subspace is not None:
        Q = np.asarray(subspace)
        if Q.shape[0] != h.dim:
            raise ShapeError(f"Subspace rows {Q.shape[0]} != operator dim {h.dim}")
        M = Q.conj().T @ M @ Q
    if not 1 <= k <= M.shape[0]:
        raise DomainError(f"Requested {k} states from a space of dimension {M.shape[0]}")

    w, v = eigh(M)
    w, v = w[:k], v[:, :k]
    if Q is not None:
        v = Q @ v

    vectors = v.astype(complex)
    for group in _clusters(w, DEGENERACY_TOL):
        if len(group) > 1:
            vectors[:, group] = align_degenerate(vectors[:, group], reference)
        else:
            vectors[:, group[0]] = _phase_fix(vectors[:, group[0]])
    return Spectrum(energies=w, vectors=vectors)


def polaritonic_states(
    mi: MolecularIntegrals,
    cav: CavitySpec,
    k: int = 3,
    spin: str = 'singlet',
    reference: Optional[np.ndarray] = None
) -> Tuple[Spectrum, HybridBasis]:
    """Lowest k eigenstates of the Pauli-Fierz Hamiltonian, by default in the singlet sector."""
    basis = build_hybrid_basis(mi.n_orb, mi.n_electrons, cav.n_b_max)
    H = build_pauli_fierz(mi, cav, basis)
    if spin == 'singlet':
        spectrum = diagonalize(H, k, subspace=singlet_subspace(basis), reference=reference)
    elif spin == 'any':
        spectrum = diagonalize(H, k, reference=reference)
    else:
        raise DomainError(f"spin must be 'singlet' or 'any', got {spin}")
    logger.debug(f"QED-FCI energies: {np.round(spectrum.energies, 8).tolist()}")
    return spectrum, basis


# =============================================================================
# OBSERVABLES
# =============================================================================

def expectation(op: OperatorMatrix, state: np.ndarray) -> float:
    if not op.hermitian:
        raise DomainError(f"Expectation of non-hermitian operator {op.label}")
    state = np.asarray(state)
    if state.shape[0] != op.dim:
        raise ShapeError(f"State dim {state.shape[0]} != operator dim {op.dim}")
    value = np.vdot(state, op.matrix @ state)
    if abs(value.imag) > 1e-10 * max(1.0, abs(value.real)):
        raise DomainError(f"Expectation has imaginary part {value.imag:.2e}")
    return float(value.real)


def photon_sector_profile(state: np.ndarray, basis: HybridBasis) -> np.ndarray:
    """Max |C_{I,n}| over determinants, for each photon number n."""
    state = np.asarray(state)
    if state.shape != (basis.size,):
        raise ShapeError(f"State shape {state.shape} does not match basis size {basis.size}")
    return np.max(np.abs(state.reshape(basis.n_determinants, basis.n_photon_levels)), axis=0)


def vertical_gap(energies: Sequence[float], i: int = 1, j: int = 2) -> float:
    return float(energies[j] - energies[i])


def truncation_convergence(
    mi: MolecularIntegrals,
    cav: CavitySpec,
    cutoffs: Sequence[int],
    k: int = 3,
    spin: str = 'singlet'
) -> List[Dict]:
    """
    Lowest-k energies for each photon cutoff.

    Smaller cutoffs give nested bases, so every energy must be non-increasing
    in the cutoff. Each row carries a `monotone` flag against the previous
    cutoff and a violation is logged.
    """
    if list(cutoffs) != sorted(cutoffs) or not cutoffs:
        raise DomainError(f"Cutoffs must be ascending, got {list(cutoffs)}")
    rows = []
    previous = None
    for n_b_max in cutoffs:
        spectrum, _ = polaritonic_states(mi, cav.with_cutoff(n_b_max), k=k, spin=spin)
        monotone = previous is None or bool(np.all(spectrum.energies <= previous + MONOTONE_TOL))
        if not monotone:
            logger.warning(f"Energies rose from N_B={rows[-1]['n_b_max']} to N_B={n_b_max}: "
                           f"{np.round(spectrum.energies - previous, 12).tolist()}")
        rows.append({'n_b_max': int(n_b_max), 'energies': spectrum.energies.tolist(), 'monotone': monotone})
        logger.info(f"  N_B={n_b_max}: {np.round(spectrum.energies, 8).tolist()}")
        previous = spectrum.energies
    return rows


def find_crossing(
    integrals_at: Callable[[float], MolecularIntegrals],
    cav: CavitySpec,
    r_bracket: Tuple[float, float],
    xtol: float = 1e-12
) -> float:
    """
    Bond length where the bare singlet gap E_S1 - E_S0 equals ω.

    This is where the 1-photon ground state crosses the 0-photon excited
    state; with the field perpendicular to the bond it is an exact LICI.
    """
    bare = CavitySpec(omega=cav.omega, coupling=0.0, polarization=cav.polarization, n_b_max=0)

    def detuning(r: float) -> float:
        spectrum, _ = polaritonic_states(integrals_at(r), bare, k=2)
        return spectrum.energies[1] - spectrum.energies[0] - cav.omega

    lo, hi = r_bracket
    if detuning(lo) * detuning(hi) > 0:
        raise DomainError(f"No resonance between r={lo} and r={hi}")
    r_star = brentq(detuning, lo, hi, xtol=xtol)
    logger.info(f"Resonance at r = {r_star:.10f}")
    return float(r_star)
