"""
Platform backends - how each hardware type stores the photon mode.

Supports three registers:
- qubit: one-hot encoding on N_B+1 qubits, controlled-Givens entanglers
- qudit: a single (N_B+1)-level site, controlled sublevel rotations
- qumode: a truncated Fock mode, controlled displacements

Usage:
    from src.core.platforms import get_platform

    backend = get_platform('qudit')
    layout = backend.layout(n_orb=2, n_b_max=3)
"""

from .base import PlatformBackend
from .router import available_platforms, get_platform, reset_platforms

__all__ = [
    'PlatformBackend',
    'available_platforms',
    'get_platform',
    'reset_platforms',
]
