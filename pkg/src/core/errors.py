"""
Exception hierarchy for the polariton engines.

Every error raised on purpose by src.core derives from PolaritonError so the
runner can map it onto an exit code without catching unrelated failures.
"""

from typing import Optional


class PolaritonError(Exception):
    """Base exception for polariton engine errors."""
    pass


class UnsupportedBasisError(PolaritonError):
    """Basis contains shells the integral engine cannot evaluate."""
    pass


class SingularGeometryError(PolaritonError):
    """Two nuclei coincide or the geometry is otherwise degenerate."""
    pass


class ConvergenceError(PolaritonError):
    """An iterative solver ran out of cycles."""
    pass


class ShapeError(PolaritonError):
    """Array dimensions do not match."""
    pass


class FCIDUMPParseError(PolaritonError):
    """Malformed integral dump; carries the offending line number."""

    def __init__(self, path: str, line_number: int, message: str):
        self.path = str(path)
        self.line_number = line_number
        super().__init__(f"{self.path}:{line_number}: {message}")


class AbsentDipoleError(PolaritonError):
    """Dipole integrals are required but were not supplied."""
    pass


class DomainError(PolaritonError):
    """Argument outside the mathematical domain of an operation."""
    pass


class CapacityError(PolaritonError):
    """Requested basis would exceed the configured size cap."""

    def __init__(self, size: int, cap: int, message: Optional[str] = None):
        self.size = size
        self.cap = cap
        super().__init__(message or f"Basis size {size} exceeds cap {cap}")


class ConfigurationError(PolaritonError):
    """Invalid configuration value or inconsistent settings."""
    pass


class GateDefinitionError(PolaritonError):
    """Gate sites collide or fall outside the register."""
    pass


class LayoutError(PolaritonError):
    """Gate or state does not fit the register layout."""
    pass


class LeakageError(PolaritonError):
    """Amplitude escaped the physical subspace of the register."""

    def __init__(self, weight: float, tolerance: float):
        self.weight = weight
        self.tolerance = tolerance
        super().__init__(f"Unphysical weight {weight:.3e} exceeds tolerance {tolerance:.1e}")


class StateCountError(PolaritonError):
    """Number of states differs between result and reference."""
    pass
