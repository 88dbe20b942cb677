"""
Platform registry - lazy lookup of the three register backends.
"""

import logging
from typing import Dict, List

from src.config import PLATFORMS
from src.core.errors import ConfigurationError

from .base import PlatformBackend

logger = logging.getLogger('Polariton.Platforms.Router')

# Global backend instances
_platforms: Dict[str, PlatformBackend] = {}


def _create(name: str) -> PlatformBackend:
    if name == 'qubit':
        from .qubit import QubitPlatform
        return QubitPlatform()
    if name == 'qudit':
        from .qudit import QuditPlatform
        return QuditPlatform()
    if name == 'qumode':
        from .qumode import QumodePlatform
        return QumodePlatform()
    raise ConfigurationError(f"Unknown platform '{name}' (expected one of {', '.join(PLATFORMS)})")


def get_platform(name: str) -> PlatformBackend:
    """Get or create the backend for a platform name."""
    if name not in _platforms:
        _platforms[name] = _create(name)
        logger.debug(f"Created {name} platform backend")
    return _platforms[name]


def available_platforms() -> List[str]:
    return list(PLATFORMS)


def reset_platforms():
    """Reset the backend cache (for testing)."""
    _platforms.clear()
