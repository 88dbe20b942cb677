"""Task module init - exports all task functions."""

from .chemistry_task import run_integrals, run_qedfci, run_resources
from .single_point_task import run_single_point, solve_point
from .scan_task import run_scan
from .sweep_task import run_coupling_sweep, run_layer_sweep
from .profile_task import run_sector_profile, run_truncation_study

__all__ = [
    # Oracle and chemistry
    'run_integrals',
    'run_qedfci',
    'run_resources',
    # SA-VQE experiments
    'run_single_point',
    'solve_point',
    'run_scan',
    'run_layer_sweep',
    'run_coupling_sweep',
    # Oracle-only studies
    'run_sector_profile',
    'run_truncation_study',
]
