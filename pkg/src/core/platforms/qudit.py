"""
Qudit platform: one d = N_B+1 level site with controlled sublevel rotations.
"""

import logging
from typing import List, Tuple

from src.core.mappings import RegisterLayout
from src.core.simulator import Gate, GateKind

from .base import PlatformBackend

logger = logging.getLogger('Polariton.Platforms.Qudit')


class QuditPlatform(PlatformBackend):
    name = "qudit"

    def entangler(
        self,
        layout: RegisterLayout,
        first_slot: int,
        break_spin_pairing: bool = False
    ) -> Tuple[List[Gate], int]:
        self.check_layout(layout)
        transitions = layout.photon_cutoff
        site = layout.boson_sites[0]
        gates = []
        for q in range(layout.n_ferm):
            owner = q if break_spin_pairing else q // 2
            for t in range(transitions):
                gates.append(Gate(
                    GateKind.CONTROLLED_GIVENS_QUDIT, (q, site),
                    slot=first_slot + owner * transitions + t, level=t,
                ))
        owners = layout.n_ferm if break_spin_pairing else layout.n_orb
        return gates, owners * transitions

    def boson_units(self, layout: RegisterLayout) -> int:
        return 1
