"""
Base class for platform backends.

A backend owns the bosonic side of a register: how photons are stored and
which controlled gates couple each spin-orbital to them.
"""

import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Tuple

from src.core.errors import LayoutError
from src.core.mappings import RegisterLayout, make_layout
from src.core.simulator import Gate

logger = logging.getLogger('Polariton.Platforms.Base')


class PlatformBackend(ABC):
    """Abstract base class for the qubit, qudit and qumode platforms."""

    name: str = "base"

    def layout(self, n_orb: int = 2, n_b_max: int = 3, n_cut: int = 15) -> RegisterLayout:
        return make_layout(self.name, n_orb=n_orb, n_b_max=n_b_max, n_cut=n_cut)

    def check_layout(self, layout: RegisterLayout):
        if layout.platform != self.name:
            raise LayoutError(f"{self.name} ansatz cannot run on a {layout.platform} register")

    @abstractmethod
    def entangler(
        self,
        layout: RegisterLayout,
        first_slot: int,
        break_spin_pairing: bool = False
    ) -> Tuple[List[Gate], int]:
        """
        One layer of electron-photon entangling gates.

        Args:
            layout: Register of this platform
            first_slot: First free parameter slot
            break_spin_pairing: Give ↑ and ↓ controls separate slots

        Returns:
            (gates, number of slots used)
        """
        pass

    @abstractmethod
    def boson_units(self, layout: RegisterLayout) -> int:
        """Physical information units holding the photon mode."""
        pass

    def get_status(self) -> Dict[str, Any]:
        return {'name': self.name}
