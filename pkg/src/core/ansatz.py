"""
Layered polaritonic ansätze, SA-VQE initial states and resource counting.

Each layer is a Gate-Fabric block on the fermion qubits followed by the
platform's electron-photon entangler. Parameter slots are numbered layer by
layer, so a circuit with more layers extends the slot vector of a shallower
one at the end.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.errors import DomainError, LayoutError, ShapeError
from src.core.mappings import RegisterLayout, creation_matrices, spin_orbital
from src.core.platforms import get_platform
from src.core.simulator import Gate, GateKind, apply_gates, compile_gate, entangling_count

logger = logging.getLogger('Polariton.Ansatz')

INITIAL_TAGS = ('A', 'B', 'C')


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list with its parameter-slot table."""
    platform: str
    layout: RegisterLayout
    gates: Tuple[Gate, ...]
    n_params: int
    n_layers: int
    fabric_slots: Tuple[int, ...] = ()
    spin_paired: bool = True

    @property
    def entangler_slots(self) -> Tuple[int, ...]:
        fabric = set(self.fabric_slots)
        return tuple(s for s in range(self.n_params) if s not in fabric)

    def _check(self, params: Optional[Sequence[float]]) -> Optional[np.ndarray]:
        if self.n_params == 0:
            return None if params is None else np.asarray(params, dtype=float)
        params = np.asarray(params, dtype=float)
        if params.shape != (self.n_params,):
            raise ShapeError(f"Circuit has {self.n_params} parameters, got shape {params.shape}")
        return params

    def apply(self, states: np.ndarray, params: Optional[Sequence[float]] = None) -> np.ndarray:
        """Run the circuit on one state (dim,) or a batch (dim, k)."""
        if states.shape[0] != self.layout.dim:
            raise ShapeError(f"State dim {states.shape[0]} != register dim {self.layout.dim}")
        return apply_gates(states, self.gates, self._check(params), self.layout)

    def bind(self, params: Sequence[float]) -> List[Dict[str, Any]]:
        """Per-gate angles for a parameter vector."""
        params = self._check(params)
        bound = []
        for gate in self.gates:
            entry = gate.to_dict()
            entry['theta'] = float(gate.resolve(params))
            bound.append(entry)
        return bound

    def slot_usage(self) -> Dict[int, int]:
        usage: Dict[int, int] = {}
        for gate in self.gates:
            if gate.slot is not None:
                usage[gate.slot] = usage.get(gate.slot, 0) + 1
        return usage

    def to_dict(self, params: Optional[Sequence[float]] = None) -> Dict[str, Any]:
        return {
            'platform': self.platform,
            'layout': self.layout.to_dict(),
            'n_layers': self.n_layers,
            'spin_paired': self.spin_paired,
            'gates': [g.to_dict() for g in self.gates],
            'params': None if params is None else [float(p) for p in params],
        }


def _fabric_pairs(n_orb: int) -> List[Tuple[int, int]]:
    """Neighbouring orbital pairs, even bricks then odd bricks."""
    even = [(p, p + 1) for p in range(0, n_orb - 1, 2)]
    odd = [(p, p + 1) for p in range(1, n_orb - 1, 2)]
    return even + odd


def build_ansatz(
    platform: str,
    n_layers: int,
    layout: RegisterLayout,
    break_spin_pairing: bool = False
) -> Circuit:
    """
    Build the layered ansatz for a platform.

    Args:
        platform: 'qubit', 'qudit' or 'qumode'
        n_layers: Number of layers (0 gives the identity)
        layout: Register matching the platform
        break_spin_pairing: Separate ↑/↓ slots in the entangler

    Returns:
        Circuit with slots numbered layer-major
    """
    if n_layers < 0:
        raise DomainError(f"n_layers must be >= 0, got {n_layers}")
    backend = get_platform(platform)
    backend.check_layout(layout)

    gates: List[Gate] = []
    fabric_slots: List[int] = []
    slot = 0
    for _ in range(n_layers):
        for p, q in _fabric_pairs(layout.n_orb):
            sites = tuple(range(spin_orbital(p, 0), spin_orbital(q, 1) + 1))
            gates.append(Gate(GateKind.FABRIC_SINGLE, sites, slot=slot))
            gates.append(Gate(GateKind.FABRIC_PAIR, sites, slot=slot + 1))
            fabric_slots.extend((slot, slot + 1))
            slot += 2
        layer_gates, used = backend.entangler(layout, slot, break_spin_pairing=break_spin_pairing)
        gates.extend(layer_gates)
        slot += used

    circuit = Circuit(
        platform=platform, layout=layout, gates=tuple(gates), n_params=slot,
        n_layers=n_layers, fabric_slots=tuple(fabric_slots),
        spin_paired=not break_spin_pairing,
    )
    logger.debug(f"{platform} ansatz: {n_layers} layers, {len(gates)} gates, {slot} parameters")
    return circuit


# =============================================================================
# INITIAL STATES
# =============================================================================

@dataclass(frozen=True)
class EnsembleSpec:
    tags: Tuple[str, ...] = INITIAL_TAGS

    def __post_init__(self):
        unknown = [t for t in self.tags if t not in INITIAL_TAGS]
        if unknown or not self.tags or len(set(self.tags)) != len(self.tags):
            raise DomainError(f"Initial-state tags must be distinct members of {INITIAL_TAGS}, got {self.tags}")

    @property
    def n_states(self) -> int:
        return len(self.tags)

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.n_states, 1.0 / self.n_states)


def hf_determinant(n_ferm: int, n_electrons: int) -> int:
    """Lowest spin-orbitals occupied, qubit 0 most significant."""
    return sum(1 << (n_ferm - 1 - k) for k in range(n_electrons))


def prepare_initial_states(
    layout: RegisterLayout,
    n_electrons: int = 2,
    ensemble: Optional[EnsembleSpec] = None
) -> np.ndarray:
    """
    Orthonormal SA-VQE starting states as columns.

    A: |HF>|0>, B: E_LH|HF>/√2 |0> (HOMO -> LUMO spin-free singlet), C: |HF>|1>.
    """
    ensemble = ensemble or EnsembleSpec()
    if n_electrons < 2 or n_electrons % 2:
        raise DomainError(f"Closed-shell reference needs an even electron count >= 2, got {n_electrons}")
    homo, lumo = n_electrons // 2 - 1, n_electrons // 2
    if lumo >= layout.n_orb:
        raise DomainError(f"No LUMO: {n_electrons} electrons fill all {layout.n_orb} orbitals")
    if 'C' in ensemble.tags and layout.n_photon_levels < 2:
        raise LayoutError("A one-photon initial state needs at least two photon levels")

    hf = np.zeros(layout.fermion_dim, dtype=complex)
    hf[hf_determinant(layout.n_ferm, n_electrons)] = 1.0

    cre = creation_matrices(layout.n_ferm)
    excitation = sum(
        cre[spin_orbital(lumo, s)] @ cre[spin_orbital(homo, s)].conj().T for s in (0, 1)
    )
    singles = excitation @ hf / np.sqrt(2.0)

    def photons(n: int) -> np.ndarray:
        v = np.zeros(layout.boson_dim, dtype=complex)
        v[layout.photon_code(n)] = 1.0
        return v

    columns = {
        'A': np.kron(hf, photons(0)),
        'B': np.kron(singles, photons(0)),
        'C': np.kron(hf, photons(1)) if 'C' in ensemble.tags else None,
    }
    return np.column_stack([columns[t] for t in ensemble.tags])


# =============================================================================
# RESOURCES
# =============================================================================

@dataclass
class ResourceReport:
    platform: str
    n_layers: int
    boson_units: int
    fermion_qubits: int
    entangling_gates: int
    parameters: int
    fabric_parameters: int
    entangler_parameters: int
    per_layer: Dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'platform': self.platform,
            'n_layers': self.n_layers,
            'boson_units': self.boson_units,
            'fermion_qubits': self.fermion_qubits,
            'entangling_gates': self.entangling_gates,
            'parameters': self.parameters,
            'fabric_parameters': self.fabric_parameters,
            'entangler_parameters': self.entangler_parameters,
            'per_layer': dict(self.per_layer),
        }


def count_resources(circuit: Circuit, style: str = 'cry') -> ResourceReport:
    """
    Electron-photon entangling gates and parameter counts.

    Qubit controlled-Givens gates are expanded into their compiled primitives
    and controlled displacements into two parity gates; fabric blocks act
    on fermions only and are not counted as entanglers.
    """
    backend = get_platform(circuit.platform)
    entanglers = [g for g in circuit.gates
                  if g.kind not in (GateKind.FABRIC_SINGLE, GateKind.FABRIC_PAIR)]
    total = entangling_count(entanglers, style=style)
    n_fabric = len(circuit.fabric_slots)

    per_layer: Dict[str, int] = {}
    if circuit.n_layers:
        totals = {
            'entangling_gates': total,
            'parameters': circuit.n_params,
            'primitive_gates': sum(len(compile_gate(g, style)) for g in circuit.gates),
        }
        for name, count in totals.items():
            layer_count, remainder = divmod(count, circuit.n_layers)
            if remainder:
                raise ShapeError(f"{count} {name} do not split over {circuit.n_layers} identical layers")
            per_layer[name] = layer_count

    report = ResourceReport(
        platform=circuit.platform,
        n_layers=circuit.n_layers,
        boson_units=backend.boson_units(circuit.layout),
        fermion_qubits=circuit.layout.n_ferm,
        entangling_gates=total,
        parameters=circuit.n_params,
        fabric_parameters=n_fabric,
        entangler_parameters=circuit.n_params - n_fabric,
        per_layer=per_layer,
    )
    return report
