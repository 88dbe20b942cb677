"""
State-vector engine for mixed qubit / qudit / qumode registers.

A register is a list of site dimensions (RegisterLayout.site_dims). Gates act
through small local matrices: the target axes of the state tensor are moved
to the front, multiplied, and moved back. States may carry a trailing batch
axis, so the three SA-VQE trial states evolve together.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh

from src.core.errors import DomainError, GateDefinitionError, LayoutError
from src.core.mappings import (
    RegisterLayout,
    boson_ops_qumode,
    creation_matrices,
    spin_orbital,
)

logger = logging.getLogger('Polariton.Simulator')

TAIL_WARNING = 1e-8


class GateKind(str, Enum):
    # primitives
    H = 'H'
    X = 'X'
    Z = 'Z'
    S = 'S'
    SDG = 'SDG'
    RX = 'RX'
    RY = 'RY'
    RZ = 'RZ'
    CX = 'CX'
    CRY = 'CRY'
    CRZ = 'CRZ'
    # qubit photonic ladder
    GIVENS_QUBIT = 'GivensQubit'
    CONTROLLED_GIVENS_QUBIT = 'ControlledGivensQubit'
    # qudit
    GIVENS_QUDIT = 'GivensQudit'
    CONTROLLED_GIVENS_QUDIT = 'ControlledGivensQudit'
    # qumode
    DISPLACEMENT = 'Displacement'
    MOMENTUM_DISPLACEMENT = 'MomentumDisplacement'
    CONTROLLED_PARITY = 'ControlledParity'
    CONTROLLED_DISPLACEMENT = 'ControlledDisplacement'
    # fermionic Gate-Fabric blocks
    FABRIC_SINGLE = 'FabricSingle'
    FABRIC_PAIR = 'FabricPair'


CONTROLLED_KINDS = {
    GateKind.CX, GateKind.CRY, GateKind.CRZ,
    GateKind.CONTROLLED_GIVENS_QUBIT, GateKind.CONTROLLED_GIVENS_QUDIT,
    GateKind.CONTROLLED_PARITY, GateKind.CONTROLLED_DISPLACEMENT,
}

# two-site primitives counted as entangling operations
ENTANGLING_PRIMITIVES = {
    GateKind.CX, GateKind.CRY, GateKind.CRZ,
    GateKind.CONTROLLED_GIVENS_QUDIT, GateKind.CONTROLLED_PARITY,
}


@dataclass(frozen=True)
class Gate:
    """
    One gate in a circuit.

    The applied angle is `angle + scale * params[slot]`; gates without a slot
    use `angle` alone. `level` selects the qudit transition l -> l+1.
    """
    kind: GateKind
    sites: Tuple[int, ...]
    slot: Optional[int] = None
    scale: float = 1.0
    angle: float = 0.0
    level: int = 0
    compiled: bool = False

    def __post_init__(self):
        if len(set(self.sites)) != len(self.sites):
            raise GateDefinitionError(f"{self.kind.value}: repeated site in {self.sites}")
        if self.slot is not None and self.slot < 0:
            raise GateDefinitionError(f"{self.kind.value}: negative parameter slot")

    @property
    def controls(self) -> Tuple[int, ...]:
        return self.sites[:1] if self.kind in CONTROLLED_KINDS else ()

    @property
    def targets(self) -> Tuple[int, ...]:
        return self.sites[1:] if self.kind in CONTROLLED_KINDS else self.sites

    def resolve(self, params: Optional[Sequence[float]] = None) -> float:
        if self.slot is None:
            return self.angle
        if params is None:
            raise GateDefinitionError(f"{self.kind.value} needs parameter slot {self.slot}")
        return self.angle + self.scale * params[self.slot]

    def to_dict(self) -> Dict:
        d = {'kind': self.kind.value, 'sites': list(self.sites), 'param_slot': self.slot}
        if self.scale != 1.0:
            d['scale'] = self.scale
        if self.angle:
            d['angle'] = self.angle
        if self.kind in (GateKind.GIVENS_QUDIT, GateKind.CONTROLLED_GIVENS_QUDIT):
            d['level'] = self.level
        return d


# =============================================================================
# LOCAL MATRICES
# =============================================================================

def _controlled(u: np.ndarray) -> np.ndarray:
    d = u.shape[0]
    out = np.eye(2 * d, dtype=complex)
    out[d:, d:] = u
    return out


def _rx(t):
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def _ry(t):
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(t):
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


def givens_qubit(theta: float) -> np.ndarray:
    """|01> -> cos|01> + sin|10>, |10> -> cos|10> - sin|01>."""
    c, s = np.cos(theta), np.sin(theta)
    g = np.eye(4, dtype=complex)
    g[1, 1] = g[2, 2] = c
    g[2, 1] = s
    g[1, 2] = -s
    return g


def givens_qudit(theta: float, d: int, level: int) -> np.ndarray:
    """exp(-iθ Λ^Y_{l,l+1}): |l> -> cos|l> + sin|l+1>."""
    if not 0 <= level < d - 1:
        raise LayoutError(f"Qudit transition {level}->{level + 1} outside d={d}")
    g = np.eye(d, dtype=complex)
    c, s = np.cos(theta), np.sin(theta)
    g[level, level] = g[level + 1, level + 1] = c
    g[level + 1, level] = s
    g[level, level + 1] = -s
    return g


@lru_cache(maxsize=32)
def _hermitian_eig(kind: str, n_levels: int):
    """Eigendecomposition of a fixed hermitian generator on a Fock space."""
    bdag, b = boson_ops_qumode(n_levels - 1)
    if kind == 'momentum':          # i(b - b†) = -i·(θ⁻¹ log D(θ))
        generator = 1j * (b - bdag)
    elif kind == 'position':        # b + b†
        generator = b + bdag
    else:
        raise DomainError(kind)
    return eigh(generator)


def _exp_hermitian(kind: str, n_levels: int, t: float) -> np.ndarray:
    """exp(-i t G) for the cached generator G."""
    w, v = _hermitian_eig(kind, n_levels)
    return (v * np.exp(-1j * t * w)) @ v.conj().T


def displacement(theta: float, n_levels: int) -> np.ndarray:
    """D(θ) = exp(θb - θb†) for real θ."""
    # θ(b - b†) = -iθ·[i(b - b†)]
    return _exp_hermitian('momentum', n_levels, theta)


def momentum_displacement(theta: float, n_levels: int) -> np.ndarray:
    """D(-iθ) = exp(-iθ(b + b†))."""
    return _exp_hermitian('position', n_levels, theta)


def controlled_parity(phi: float, n_levels: int) -> np.ndarray:
    """exp(-iφ/2 Z⊗n); CR(π) at φ = π."""
    n = np.arange(n_levels)
    return np.diag(np.concatenate([np.exp(-0.5j * phi * n), np.exp(0.5j * phi * n)]))


def controlled_displacement(theta: float, n_levels: int) -> np.ndarray:
    """exp(Z⊗(θb - θb†)): D(θ) for control |0>, D(-θ) for control |1>."""
    out = np.zeros((2 * n_levels, 2 * n_levels), dtype=complex)
    out[:n_levels, :n_levels] = displacement(theta, n_levels)
    out[n_levels:, n_levels:] = displacement(-theta, n_levels)
    return out


@lru_cache(maxsize=8)
def _fabric_generator_eig(kind: str):
    """Eigendecomposition of i·K for the 4-qubit fabric generators K."""
    cre = creation_matrices(4)
    ann = [c.conj().T for c in cre]
    p_up, p_dn, q_up, q_dn = (spin_orbital(0, 0), spin_orbital(0, 1),
                              spin_orbital(1, 0), spin_orbital(1, 1))
    if kind == 'single':
        e_qp = cre[q_up] @ ann[p_up] + cre[q_dn] @ ann[p_dn]
        K = e_qp - e_qp.conj().T
    elif kind == 'pair':
        T = cre[q_up] @ cre[q_dn] @ ann[p_dn] @ ann[p_up]
        K = T - T.conj().T
    else:
        raise DomainError(f"Unknown fabric block '{kind}'")
    return eigh(1j * K)


def fabric_block(kind: str, theta: float) -> np.ndarray:
    """exp(θK) on (p↑, p↓, q↑, q↓) with K anti-hermitian."""
    w, v = _fabric_generator_eig(kind)
    # exp(θK) = exp(-iθ·(iK))
    return (v * np.exp(-1j * theta * w)) @ v.conj().T


_FIXED = {
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Z: np.diag([1, -1]).astype(complex),
    GateKind.S: np.diag([1, 1j]),
    GateKind.SDG: np.diag([1, -1j]),
}
_CX = _controlled(_FIXED[GateKind.X])

# kind -> builder(theta, gate, dims of its sites)
BUILDERS: Dict[GateKind, Callable[[float, Gate, List[int]], np.ndarray]] = {
    GateKind.RX: lambda t, g, d: _rx(t),
    GateKind.RY: lambda t, g, d: _ry(t),
    GateKind.RZ: lambda t, g, d: _rz(t),
    GateKind.CX: lambda t, g, d: _CX,
    GateKind.CRY: lambda t, g, d: _controlled(_ry(t)),
    GateKind.CRZ: lambda t, g, d: _controlled(_rz(t)),
    GateKind.GIVENS_QUBIT: lambda t, g, d: givens_qubit(t),
    GateKind.CONTROLLED_GIVENS_QUBIT: lambda t, g, d: _controlled(givens_qubit(t)),
    GateKind.GIVENS_QUDIT: lambda t, g, d: givens_qudit(t, d[0], g.level),
    GateKind.CONTROLLED_GIVENS_QUDIT: lambda t, g, d: _controlled(givens_qudit(t, d[1], g.level)),
    GateKind.DISPLACEMENT: lambda t, g, d: displacement(t, d[0]),
    GateKind.MOMENTUM_DISPLACEMENT: lambda t, g, d: momentum_displacement(t, d[0]),
    GateKind.CONTROLLED_PARITY: lambda t, g, d: controlled_parity(t, d[1]),
    GateKind.CONTROLLED_DISPLACEMENT: lambda t, g, d: controlled_displacement(t, d[1]),
    GateKind.FABRIC_SINGLE: lambda t, g, d: fabric_block('single', t),
    GateKind.FABRIC_PAIR: lambda t, g, d: fabric_block('pair', t),
}
for _kind, _matrix in _FIXED.items():
    BUILDERS[_kind] = (lambda m: lambda t, g, d: m)(_matrix)

QUBIT_SITES = {
    GateKind.H: 1, GateKind.X: 1, GateKind.Z: 1, GateKind.S: 1, GateKind.SDG: 1,
    GateKind.RX: 1, GateKind.RY: 1, GateKind.RZ: 1,
    GateKind.CX: 2, GateKind.CRY: 2, GateKind.CRZ: 2,
    GateKind.GIVENS_QUBIT: 2, GateKind.CONTROLLED_GIVENS_QUBIT: 3,
    GateKind.FABRIC_SINGLE: 4, GateKind.FABRIC_PAIR: 4,
}
MODE_GATES = {
    GateKind.DISPLACEMENT, GateKind.MOMENTUM_DISPLACEMENT,
    GateKind.CONTROLLED_PARITY, GateKind.CONTROLLED_DISPLACEMENT,
}


def _validate(gate: Gate, layout: RegisterLayout) -> List[int]:
    """Check sites against the layout and return their dimensions."""
    dims = layout.site_dims
    if any(not 0 <= s < len(dims) for s in gate.sites):
        raise GateDefinitionError(f"{gate.kind.value}: sites {gate.sites} outside register of {len(dims)}")
    site_dims = [dims[s] for s in gate.sites]

    if gate.kind in QUBIT_SITES:
        if len(gate.sites) != QUBIT_SITES[gate.kind]:
            raise GateDefinitionError(f"{gate.kind.value} acts on {QUBIT_SITES[gate.kind]} sites")
        if any(d != 2 for d in site_dims):
            raise LayoutError(f"{gate.kind.value} needs qubit sites, got dims {site_dims}")
    if gate.kind in (GateKind.FABRIC_SINGLE, GateKind.FABRIC_PAIR):
        s = gate.sites
        if any(x >= layout.n_ferm for x in s) or list(s) != list(range(s[0], s[0] + 4)) or s[0] % 2:
            raise LayoutError(f"{gate.kind.value} needs two neighbouring spatial orbitals, got {s}")
    if gate.kind in MODE_GATES or gate.kind in (GateKind.GIVENS_QUDIT, GateKind.CONTROLLED_GIVENS_QUDIT):
        controlled = gate.kind in CONTROLLED_KINDS
        if len(gate.sites) != (2 if controlled else 1):
            raise GateDefinitionError(f"{gate.kind.value}: wrong number of sites {gate.sites}")
        if controlled and site_dims[0] != 2:
            raise LayoutError(f"{gate.kind.value}: control must be a qubit")
        mode = gate.sites[-1]
        if mode not in layout.boson_sites:
            raise LayoutError(f"{gate.kind.value}: site {mode} is not bosonic")
        wanted = 'qumode' if gate.kind in MODE_GATES else 'qudit'
        if layout.platform != wanted:
            raise LayoutError(f"{gate.kind.value} needs a {wanted} register, layout is {layout.platform}")
    return site_dims


def local_matrix(gate: Gate, theta: float, layout: RegisterLayout) -> np.ndarray:
    site_dims = _validate(gate, layout)
    if gate.kind == GateKind.CONTROLLED_DISPLACEMENT and np.iscomplexobj(theta) and np.imag(theta) != 0:
        raise DomainError("Controlled-displacement parameters must be real")
    return BUILDERS[gate.kind](theta, gate, site_dims)


# =============================================================================
# APPLICATION
# =============================================================================

def apply_local(state: np.ndarray, matrix: np.ndarray, sites: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Apply a local matrix on `sites`; `state` is (dim,) or (dim, batch)."""
    batch = state.shape[1] if state.ndim == 2 else 1
    tensor = state.reshape(tuple(dims) + (batch,))
    front = list(range(len(sites)))
    tensor = np.moveaxis(tensor, list(sites), front)
    shape = tensor.shape
    tensor = (matrix @ tensor.reshape(matrix.shape[1], -1)).reshape(shape)
    return np.moveaxis(tensor, front, list(sites)).reshape(state.shape)


def apply(state: np.ndarray, gate: Gate, theta: float, layout: RegisterLayout) -> np.ndarray:
    """Apply one gate at angle θ (the gate's slot/scale are ignored here)."""
    if state.shape[0] != layout.dim:
        raise LayoutError(f"State dim {state.shape[0]} != register dim {layout.dim}")
    return apply_local(state.astype(complex, copy=False), local_matrix(gate, theta, layout),
                       gate.sites, layout.site_dims)


def apply_gates(
    state: np.ndarray,
    gates: Sequence[Gate],
    params: Optional[Sequence[float]],
    layout: RegisterLayout
) -> np.ndarray:
    """Apply a gate list, resolving each angle from the parameter vector."""
    out = state.astype(complex)
    dims = layout.site_dims
    for gate in gates:
        out = apply_local(out, local_matrix(gate, gate.resolve(params), layout), gate.sites, dims)
    return out


def gate_matrix(gate: Gate, theta: float, layout: RegisterLayout) -> np.ndarray:
    """Full-register unitary of one gate."""
    return apply(np.eye(layout.dim, dtype=complex), gate, theta, layout)


def sequence_matrix(gates: Sequence[Gate], params: Optional[Sequence[float]], layout: RegisterLayout) -> np.ndarray:
    return apply_gates(np.eye(layout.dim, dtype=complex), gates, params, layout)


def apply_displacement(state: np.ndarray, theta: float, layout: RegisterLayout, site: Optional[int] = None) -> np.ndarray:
    """D(θ) on the qumode; warns when the top two Fock levels gain weight."""
    if np.iscomplexobj(theta) and np.imag(theta) != 0:
        raise DomainError("Displacement parameters must be real")
    if layout.platform != 'qumode':
        raise LayoutError("Displacement needs a qumode register")
    site = layout.boson_sites[0] if site is None else site
    out = apply(state, Gate(GateKind.DISPLACEMENT, (site,)), float(np.real(theta)), layout)
    tail = fock_tail_weight(out, layout)
    if tail > TAIL_WARNING:
        logger.warning(f"Coherent tail above Fock level {layout.photon_cutoff - 2}: {tail:.2e}")
    return out


def apply_fabric_block(state: np.ndarray, kind: str, p: int, q: int, theta: float, layout: RegisterLayout) -> np.ndarray:
    if q != p + 1:
        raise LayoutError(f"Fabric blocks act on neighbouring orbitals, got ({p}, {q})")
    if kind not in ('single', 'pair'):
        raise DomainError(f"Unknown fabric block '{kind}'")
    gate_kind = GateKind.FABRIC_SINGLE if kind == 'single' else GateKind.FABRIC_PAIR
    sites = tuple(range(spin_orbital(p, 0), spin_orbital(q, 1) + 1))
    return apply(state, Gate(gate_kind, sites), theta, layout)


# =============================================================================
# MONITORS
# =============================================================================

def _boson_weights(state: np.ndarray, layout: RegisterLayout) -> np.ndarray:
    amps = state.reshape(layout.fermion_dim, layout.boson_dim, -1)
    return np.sum(np.abs(amps) ** 2, axis=(0, 2))


def one_hot_leakage(state: np.ndarray, layout: RegisterLayout) -> float:
    """Weight outside the one-hot photon encoding (qubit registers)."""
    if layout.platform != 'qubit':
        return 0.0
    weights = _boson_weights(state, layout)
    valid = [layout.photon_code(n) for n in range(layout.n_photon_levels)]
    return float(np.sum(weights) - np.sum(weights[valid]))


def fock_tail_weight(state: np.ndarray, layout: RegisterLayout, levels: int = 2) -> float:
    """Population in the top `levels` Fock states of a qumode."""
    if layout.platform != 'qumode':
        return 0.0
    return float(np.sum(_boson_weights(state, layout)[-levels:]))


# =============================================================================
# COMPILATION
# =============================================================================

def compile_controlled_givens(gate: Gate, style: str = 'cry') -> List[Gate]:
    """
    Expand a controlled qubit Givens rotation into primitives.

    'cry': CX(a,b) conjugated by S†H on a and S†X on b turns X_aY_b into Y_a
    and Y_aX_b into Y_b, so two CRY rotations remain (2 CX + 2 CRY).
    'pauli': each of the two commuting exponentials done as a ZZ rotation
    between basis changes (4 CX + 2 CRZ).
    """
    if gate.kind != GateKind.CONTROLLED_GIVENS_QUBIT:
        raise GateDefinitionError(f"Cannot compile {gate.kind.value} as controlled-Givens")
    c, a, b = gate.sites
    slot, scale, angle = gate.slot, gate.scale, gate.angle

    def param(kind, sites, sign):
        return Gate(kind, sites, slot=slot, scale=sign * scale, angle=sign * angle, compiled=True)

    def fixed(kind, sites, value=0.0):
        return Gate(kind, sites, angle=value, compiled=True)

    if style == 'cry':
        return [
            fixed(GateKind.SDG, (a,)), fixed(GateKind.H, (a,)),
            fixed(GateKind.SDG, (b,)), fixed(GateKind.X, (b,)),
            fixed(GateKind.CX, (a, b)),
            param(GateKind.CRY, (c, a), -1.0),
            param(GateKind.CRY, (c, b), +1.0),
            fixed(GateKind.CX, (a, b)),
            fixed(GateKind.H, (a,)), fixed(GateKind.S, (a,)),
            fixed(GateKind.X, (b,)), fixed(GateKind.S, (b,)),
        ]
    if style == 'pauli':
        half = np.pi / 2
        return [
            # exp(iθ/2 X_a Y_b)
            fixed(GateKind.H, (a,)), fixed(GateKind.RX, (b,), half),
            fixed(GateKind.CX, (a, b)),
            param(GateKind.CRZ, (c, b), -1.0),
            fixed(GateKind.CX, (a, b)),
            fixed(GateKind.H, (a,)), fixed(GateKind.RX, (b,), -half),
            # exp(-iθ/2 Y_a X_b)
            fixed(GateKind.RX, (a,), half), fixed(GateKind.H, (b,)),
            fixed(GateKind.CX, (a, b)),
            param(GateKind.CRZ, (c, b), +1.0),
            fixed(GateKind.CX, (a, b)),
            fixed(GateKind.RX, (a,), -half), fixed(GateKind.H, (b,)),
        ]
    raise DomainError(f"Unknown controlled-Givens style '{style}'")


def compile_controlled_displacement(gate: Gate) -> List[Gate]:
    """CD(θ) = CR(π) · D(-iθ) · CR(π)†."""
    if gate.kind != GateKind.CONTROLLED_DISPLACEMENT:
        raise GateDefinitionError(f"Cannot compile {gate.kind.value} as controlled-displacement")
    c, mode = gate.sites
    return [
        Gate(GateKind.CONTROLLED_PARITY, (c, mode), angle=-np.pi, compiled=True),
        Gate(GateKind.MOMENTUM_DISPLACEMENT, (mode,), slot=gate.slot, scale=gate.scale,
             angle=gate.angle, compiled=True),
        Gate(GateKind.CONTROLLED_PARITY, (c, mode), angle=np.pi, compiled=True),
    ]


def compile_gate(gate: Gate, style: str = 'cry') -> List[Gate]:
    """Primitive expansion used for resource counting; other gates pass through."""
    if gate.kind == GateKind.CONTROLLED_GIVENS_QUBIT:
        return compile_controlled_givens(gate, style)
    if gate.kind == GateKind.CONTROLLED_DISPLACEMENT:
        return compile_controlled_displacement(gate)
    return [gate]


def entangling_count(gates: Sequence[Gate], style: str = 'cry') -> int:
    return sum(1 for g in gates for p in compile_gate(g, style) if p.kind in ENTANGLING_PRIMITIVES)
