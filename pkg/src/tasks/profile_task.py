"""
Oracle-only tasks: photon-sector profiles and photon-cutoff convergence.
"""

import logging
from typing import Any, Dict

import numpy as np

from src.config import CHEMICAL_ACCURACY, ExperimentConfig
from src.core.qedfci import photon_sector_profile, polaritonic_states, truncation_convergence

from .single_point_task import load_integrals, make_cavity

logger = logging.getLogger('Polariton.Tasks.Profile')


def run_sector_profile(config: ExperimentConfig) -> Dict[str, Any]:
    """
    Task: largest |C_{I,n}| per photon sector for the lowest states.

    Rows are one per (λ, state) at the configured geometry.
    """
    mi = load_integrals(config)
    rows = []
    for coupling in config.couplings:
        spectrum, basis = polaritonic_states(mi, make_cavity(config, coupling), k=config.n_states)
        for i in range(spectrum.k):
            profile = photon_sector_profile(spectrum.state(i), basis)
            rows.append({
                'lambda': coupling,
                'state': i,
                'energy': float(spectrum.energies[i]),
                'sectors': profile.tolist(),
            })
        logger.info(f"  ✓ λ={coupling:.3f}: ground-state sectors "
                    f"{np.round(photon_sector_profile(spectrum.state(0), basis), 6).tolist()}")
    return {'r': config.r, 'n_b_max': config.n_b_max, 'rows': rows}


def run_truncation_study(config: ExperimentConfig) -> Dict[str, Any]:
    """
    Task: polaritonic energies against the photon cutoff.

    Each row compares every cutoff with the largest one; `within_accuracy`
    flags whether the smallest cutoff stays below CHEMICAL_ACCURACY.
    """
    mi = load_integrals(config)
    rows = []
    for coupling in config.couplings:
        table = truncation_convergence(mi, make_cavity(config, coupling), config.cutoffs, k=config.n_states)
        widest = np.array(table[-1]['energies'])
        deviations = [np.abs(np.array(t['energies']) - widest).tolist() for t in table]
        rows.append({
            'lambda': coupling,
            'cutoffs': [t['n_b_max'] for t in table],
            'energies': [t['energies'] for t in table],
            'deviation_from_widest': deviations,
            'within_accuracy': bool(max(deviations[0]) < CHEMICAL_ACCURACY),
            'monotone': all(t['monotone'] for t in table),
        })
        logger.info(f"  ✓ λ={coupling:.3f}: max |ΔE| (N_B={table[0]['n_b_max']} vs "
                    f"{table[-1]['n_b_max']}) = {max(deviations[0]):.2e} Ha")
    return {'r': config.r, 'rows': rows}
