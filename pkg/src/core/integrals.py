"""
Integral engine for s-type contracted Gaussians plus restricted Hartree-Fock.

Produces MolecularIntegrals (h, g, dipole, nuclear terms) in an orthonormal
molecular-orbital basis. All quantities are in atomic units.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh
from scipy.special import erf

from src.config import Config, ANGSTROM_TO_BOHR
from src.core.errors import (
    ConvergenceError,
    DomainError,
    ShapeError,
    SingularGeometryError,
    UnsupportedBasisError,
)

logger = logging.getLogger('Polariton.Integrals')

ELEMENT_CHARGES = {'H': 1, 'He': 2, 'Li': 3, 'Be': 4}


# =============================================================================
# DOMAIN TYPES
# =============================================================================

@dataclass(frozen=True)
class Atom:
    symbol: str
    charge: float
    position: Tuple[float, float, float]  # bohr


@dataclass(frozen=True)
class Geometry:
    """Nuclear framework; r and theta_z are kept for provenance."""
    atoms: Tuple[Atom, ...]
    r: Optional[float] = None
    theta_z: float = 0.0

    def __post_init__(self):
        if not self.atoms:
            raise DomainError("Geometry needs at least one atom")
        for atom in self.atoms:
            if not np.all(np.isfinite(atom.position)):
                raise DomainError(f"Non-finite position for {atom.symbol}")
        if self.r is not None and self.r <= 0:
            raise DomainError(f"Bond length must be positive, got {self.r}")

    @property
    def positions(self) -> np.ndarray:
        return np.array([a.position for a in self.atoms], dtype=float)

    @property
    def charges(self) -> np.ndarray:
        return np.array([a.charge for a in self.atoms], dtype=float)

    def to_dict(self) -> Dict:
        return {
            'atoms': [{'symbol': a.symbol, 'charge': a.charge, 'position': list(a.position)}
                      for a in self.atoms],
            'r_bohr': self.r,
            'theta_z': self.theta_z,
        }


def h2_geometry(r_bohr: float, theta_z: float = 0.0) -> Geometry:
    """Two hydrogens at ±(r/2)(sin θ_z, 0, cos θ_z)."""
    if r_bohr <= 0:
        raise DomainError(f"Bond length must be positive, got {r_bohr}")
    axis = np.array([math.sin(theta_z), 0.0, math.cos(theta_z)])
    half = 0.5 * r_bohr * axis
    return Geometry(
        atoms=(Atom('H', 1.0, tuple(half)), Atom('H', 1.0, tuple(-half))),
        r=r_bohr,
        theta_z=theta_z,
    )


@dataclass(frozen=True)
class Shell:
    """Contracted Gaussian shell centred on one atom."""
    center: Tuple[float, float, float]
    exponents: Tuple[float, ...]
    coefficients: Tuple[float, ...]
    angular_momentum: int = 0

    def __post_init__(self):
        if self.angular_momentum != 0:
            raise UnsupportedBasisError(
                f"Only s-type shells are supported (got l={self.angular_momentum})")
        if len(self.exponents) != len(self.coefficients) or not self.exponents:
            raise UnsupportedBasisError("Exponent and coefficient lists must match and be nonempty")
        if any(a <= 0 for a in self.exponents):
            raise UnsupportedBasisError("Gaussian exponents must be positive")


@dataclass(frozen=True)
class BasisSpec:
    name: str
    shells: Tuple[Shell, ...]

    @property
    def n_ao(self) -> int:
        return len(self.shells)


@lru_cache(maxsize=8)
def _read_basis_file(path: str) -> Dict:
    with open(path) as f:
        return json.load(f)


def load_basis(geometry: Geometry, path: Optional[Path] = None) -> BasisSpec:
    """Place the shells of a JSON basis file on every atom of the geometry."""
    path = Path(path or Config.BASIS_FILE)
    data = _read_basis_file(str(path))
    shells = []
    for atom in geometry.atoms:
        element = data['elements'].get(atom.symbol)
        if element is None:
            raise UnsupportedBasisError(f"No {data.get('name', path.name)} entry for {atom.symbol}")
        for shell in element['shells']:
            shells.append(Shell(
                center=tuple(atom.position),
                exponents=tuple(shell['exponents']),
                coefficients=tuple(shell['coefficients']),
                angular_momentum=shell.get('angular_momentum', 0),
            ))
    return BasisSpec(name=data.get('name', path.stem), shells=tuple(shells))


@dataclass
class AOIntegrals:
    overlap: np.ndarray
    kinetic: np.ndarray
    nuclear: np.ndarray
    eri: np.ndarray                 # chemists' notation (pq|rs)
    dipole: np.ndarray              # (3, n_ao, n_ao), <χ_p| r_c |χ_q>
    e_nuc: float
    charges: np.ndarray
    positions: np.ndarray

    @property
    def n_ao(self) -> int:
        return self.overlap.shape[0]

    @property
    def core_hamiltonian(self) -> np.ndarray:
        return self.kinetic + self.nuclear


@dataclass
class MolecularIntegrals:
    """
    Integrals in an orthonormal orbital basis.

    dipole_e holds d^e_pq = -<φ_p|r|φ_q> per Cartesian component and
    dipole_nuc = Σ_A Z_A r_A. Either may be None for dumps read without a
    dipole file.
    """
    h: np.ndarray
    g: np.ndarray
    e_nuc: float
    n_electrons: int
    dipole_e: Optional[np.ndarray] = None
    dipole_nuc: Optional[np.ndarray] = None
    e_hf: Optional[float] = None
    metadata: Dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.h.shape[0]
        if self.h.shape != (n, n) or self.g.shape != (n, n, n, n):
            raise ShapeError(f"Inconsistent integral shapes h{self.h.shape} g{self.g.shape}")
        if self.dipole_e is not None and self.dipole_e.shape != (3, n, n):
            raise ShapeError(f"Dipole integrals must be (3, {n}, {n}), got {self.dipole_e.shape}")
        if not (np.all(np.isfinite(self.h)) and np.all(np.isfinite(self.g))):
            raise DomainError("Integrals contain non-finite entries")

    @property
    def n_orb(self) -> int:
        return self.h.shape[0]

    @property
    def has_dipole(self) -> bool:
        return self.dipole_e is not None and self.dipole_nuc is not None


# =============================================================================
# PRIMITIVE S-GAUSSIAN FORMULAS
# =============================================================================

def boys_f0(t):
    """F0(t) = ½√(π/t) erf(√t), with the series 1 - t/3 near zero."""
    t = np.asarray(t, dtype=float)
    small = t < 1e-10
    safe = np.where(small, 1.0, t)
    value = np.where(small, 1.0 - t / 3.0, 0.5 * np.sqrt(np.pi / safe) * erf(np.sqrt(safe)))
    return value if value.ndim else float(value)


def _normalized_coefficients(shell: Shell) -> np.ndarray:
    """Fold primitive norms (2a/π)^¾ into the contraction and renormalize."""
    a = np.array(shell.exponents)
    c = np.array(shell.coefficients) * (2.0 * a / np.pi) ** 0.75
    p = a[:, None] + a[None, :]
    self_overlap = np.sum(np.outer(c, c) * (np.pi / p) ** 1.5)
    return c / math.sqrt(self_overlap)


def _pair_data(sa: Shell, sb: Shell, ca: np.ndarray, cb: np.ndarray):
    """Gaussian-product quantities for every primitive pair of two shells."""
    a = np.array(sa.exponents)[:, None]
    b = np.array(sb.exponents)[None, :]
    A = np.array(sa.center)
    B = np.array(sb.center)
    p = a + b
    mu = a * b / p
    r2 = float(np.dot(A - B, A - B))
    P = (a[..., None] * A + b[..., None] * B) / p[..., None]
    weight = np.outer(ca, cb)
    return p, mu, r2, P, weight


def compute_ao_integrals(geometry: Geometry, basis: BasisSpec) -> AOIntegrals:
    """Evaluate all closed-form s-Gaussian integrals over the AO basis."""
    positions = geometry.positions
    charges = geometry.charges
    n_atoms = len(positions)

    e_nuc = 0.0
    for i in range(n_atoms):
        for j in range(i):
            dist = float(np.linalg.norm(positions[i] - positions[j]))
            if dist < 1e-8:
                raise SingularGeometryError(f"Atoms {j} and {i} coincide")
            e_nuc += charges[i] * charges[j] / dist

    shells = basis.shells
    n = len(shells)
    coeffs = [_normalized_coefficients(s) for s in shells]

    S = np.zeros((n, n))
    T = np.zeros((n, n))
    V = np.zeros((n, n))
    D = np.zeros((3, n, n))
    pairs = {}

    for i in range(n):
        for j in range(i + 1):
            p, mu, r2, P, w = _pair_data(shells[i], shells[j], coeffs[i], coeffs[j])
            prim_s = (np.pi / p) ** 1.5 * np.exp(-mu * r2)
            prim_t = mu * (3.0 - 2.0 * mu * r2) * prim_s
            prim_v = np.zeros_like(p)
            for Z, C in zip(charges, positions):
                pc2 = np.sum((P - C) ** 2, axis=-1)
                prim_v -= 2.0 * np.pi / p * Z * np.exp(-mu * r2) * boys_f0(p * pc2)

            S[i, j] = S[j, i] = np.sum(w * prim_s)
            T[i, j] = T[j, i] = np.sum(w * prim_t)
            V[i, j] = V[j, i] = np.sum(w * prim_v)
            for c in range(3):
                D[c, i, j] = D[c, j, i] = np.sum(w * prim_s * P[..., c])
            pairs[(i, j)] = (p, np.exp(-mu * r2), P, w)

    eri = np.zeros((n, n, n, n))
    keys = sorted(pairs)
    for ij, (i, j) in enumerate(keys):
        p, kab, P, wab = pairs[(i, j)]
        for (k, l) in keys[:ij + 1]:
            q, kcd, Q, wcd = pairs[(k, l)]
            # broadcast (ab) primitives against (cd) primitives
            pp = p[:, :, None, None]
            qq = q[None, None, :, :]
            pq2 = np.sum((P[:, :, None, None, :] - Q[None, None, :, :, :]) ** 2, axis=-1)
            prim = (2.0 * np.pi ** 2.5 / (pp * qq * np.sqrt(pp + qq))
                    * kab[:, :, None, None] * kcd[None, None, :, :]
                    * boys_f0(pp * qq / (pp + qq) * pq2))
            value = np.sum(wab[:, :, None, None] * wcd[None, None, :, :] * prim)
            for a, b in ((i, j), (j, i)):
                for c, d in ((k, l), (l, k)):
                    eri[a, b, c, d] = eri[c, d, a, b] = value

    logger.debug(f"AO integrals: n_ao={n}, E_nuc={e_nuc:.8f}")
    return AOIntegrals(
        overlap=S, kinetic=T, nuclear=V, eri=eri, dipole=D,
        e_nuc=e_nuc, charges=charges, positions=positions,
    )


# =============================================================================
# RESTRICTED HARTREE-FOCK
# =============================================================================

@dataclass
class RHFResult:
    mo_coeffs: np.ndarray
    mo_energies: np.ndarray
    energy: float
    cycles: int
    converged: bool

    def to_dict(self) -> Dict:
        return {
            'energy': self.energy,
            'mo_energies': self.mo_energies.tolist(),
            'cycles': self.cycles,
            'converged': self.converged,
        }


def _fix_signs(C: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude coefficient of each orbital positive."""
    C = C.copy()
    for k in range(C.shape[1]):
        if C[np.argmax(np.abs(C[:, k])), k] < 0:
            C[:, k] *= -1
    return C


def run_rhf(
    ao: AOIntegrals,
    n_electrons: int,
    max_cycles: int = 200,
    tolerance: float = 1e-10,
    damping: float = 0.3
) -> RHFResult:
    """
    Damped Roothaan iterations.

    Args:
        ao: AO integrals
        n_electrons: Even electron count, at most 2·n_ao
        max_cycles: Cycle cap before ConvergenceError
        tolerance: Max density-matrix change for convergence
        damping: Fraction of the previous density mixed into the next

    Returns:
        RHFResult with S-orthonormal, energy-ordered orbitals
    """
    if n_electrons < 0 or n_electrons % 2:
        raise DomainError(f"RHF needs an even electron count, got {n_electrons}")
    if n_electrons > 2 * ao.n_ao:
        raise DomainError(f"{n_electrons} electrons do not fit in {ao.n_ao} orbitals")

    h = ao.core_hamiltonian
    n_occ = n_electrons // 2

    def density(C):
        occ = C[:, :n_occ]
        return 2.0 * occ @ occ.T

    _, C = eigh(h, ao.overlap)
    D = density(C)

    for cycle in range(1, max_cycles + 1):
        J = np.einsum('pqrs,rs->pq', ao.eri, D)
        K = np.einsum('prqs,rs->pq', ao.eri, D)
        F = h + J - 0.5 * K
        eps, C = eigh(F, ao.overlap)
        D_new = density(C)
        change = float(np.max(np.abs(D_new - D)))
        D = (1.0 - damping) * D_new + damping * D
        logger.debug(f"SCF cycle {cycle}: ΔD={change:.3e}")

        if change < tolerance:
            C = _fix_signs(C)
            D = density(C)
            J = np.einsum('pqrs,rs->pq', ao.eri, D)
            K = np.einsum('prqs,rs->pq', ao.eri, D)
            F = h + J - 0.5 * K
            energy = 0.5 * float(np.sum(D * (h + F))) + ao.e_nuc
            logger.info(f"SCF converged in {cycle} cycles: E_HF={energy:.10f}")
            return RHFResult(mo_coeffs=C, mo_energies=eps, energy=energy,
                             cycles=cycle, converged=True)

    raise ConvergenceError(f"SCF did not converge in {max_cycles} cycles (ΔD={change:.3e})")


# =============================================================================
# AO -> MO TRANSFORM
# =============================================================================

def transform_to_mo(
    ao: AOIntegrals,
    mo_coeffs: np.ndarray,
    n_electrons: int,
    e_hf: Optional[float] = None
) -> MolecularIntegrals:
    """Rotate one-, two-electron and dipole integrals into the MO basis."""
    C = np.asarray(mo_coeffs)
    if C.ndim != 2 or C.shape[0] != ao.n_ao:
        raise ShapeError(f"Coefficient matrix {C.shape} does not match n_ao={ao.n_ao}")

    h = C.T @ ao.core_hamiltonian @ C
    g = np.einsum('pqrs,pi,qj,rk,sl->ijkl', ao.eri, C, C, C, C, optimize=True)
    dipole_e = -np.einsum('cpq,pi,qj->cij', ao.dipole, C, C)
    dipole_nuc = ao.charges @ ao.positions

    return MolecularIntegrals(
        h=0.5 * (h + h.T),
        g=g,
        e_nuc=ao.e_nuc,
        n_electrons=n_electrons,
        dipole_e=dipole_e,
        dipole_nuc=dipole_nuc,
        e_hf=e_hf,
    )


def h2_integrals(
    r_angstrom: float,
    theta_z: float = 0.0,
    basis_file: Optional[Path] = None
) -> MolecularIntegrals:
    """Geometry -> AO integrals -> RHF -> MO integrals for H₂."""
    geometry = h2_geometry(r_angstrom * ANGSTROM_TO_BOHR, theta_z)
    basis = load_basis(geometry, basis_file)
    ao = compute_ao_integrals(geometry, basis)
    scf = run_rhf(ao, n_electrons=2)
    mi = transform_to_mo(ao, scf.mo_coeffs, n_electrons=2, e_hf=scf.energy)
    mi.metadata.update({
        'molecule': 'H2',
        'basis': basis.name,
        'r_angstrom': r_angstrom,
        'theta_z': theta_z,
    })
    return mi
