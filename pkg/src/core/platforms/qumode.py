"""
Qumode platform: truncated Fock mode driven by controlled displacements.
"""

import logging
from typing import List, Tuple

from src.core.mappings import RegisterLayout
from src.core.simulator import Gate, GateKind

from .base import PlatformBackend

logger = logging.getLogger('Polariton.Platforms.Qumode')


class QumodePlatform(PlatformBackend):
    name = "qumode"

    def entangler(
        self,
        layout: RegisterLayout,
        first_slot: int,
        break_spin_pairing: bool = False
    ) -> Tuple[List[Gate], int]:
        self.check_layout(layout)
        mode = layout.boson_sites[0]
        gates = [
            Gate(GateKind.CONTROLLED_DISPLACEMENT, (q, mode),
                 slot=first_slot + (q if break_spin_pairing else q // 2))
            for q in range(layout.n_ferm)
        ]
        return gates, layout.n_ferm if break_spin_pairing else layout.n_orb

    def boson_units(self, layout: RegisterLayout) -> int:
        return 1
