"""
Qubit platform: one-hot photon register with controlled-Givens ladders.
"""

import logging
from typing import List, Tuple

from src.core.mappings import RegisterLayout
from src.core.simulator import Gate, GateKind

from .base import PlatformBackend

logger = logging.getLogger('Polariton.Platforms.Qubit')


class QubitPlatform(PlatformBackend):
    """N_B+1 qubits, photon n flagged by boson qubit n."""

    name = "qubit"

    def entangler(
        self,
        layout: RegisterLayout,
        first_slot: int,
        break_spin_pairing: bool = False
    ) -> Tuple[List[Gate], int]:
        self.check_layout(layout)
        transitions = layout.photon_cutoff
        gates = []
        for q in range(layout.n_ferm):
            owner = q if break_spin_pairing else q // 2
            for t in range(transitions):
                # |t> -> cos|t> + sin|t+1> on the one-hot pair (t+1, t)
                gates.append(Gate(
                    GateKind.CONTROLLED_GIVENS_QUBIT,
                    (q, layout.boson_site_of(t + 1), layout.boson_site_of(t)),
                    slot=first_slot + owner * transitions + t,
                ))
        owners = layout.n_ferm if break_spin_pairing else layout.n_orb
        return gates, owners * transitions

    def boson_units(self, layout: RegisterLayout) -> int:
        return layout.n_photon_levels
