"""Storage module for experiment results."""

from .result_store import ResultStore, SCHEMA_VERSION

__all__ = ['ResultStore', 'SCHEMA_VERSION']
