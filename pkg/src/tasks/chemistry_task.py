"""
Chemistry tasks: integrals, the QED-FCI oracle at one point, and ansatz
resource tables.
"""

import logging
from typing import Any, Dict

import numpy as np

from src.config import ExperimentConfig
from src.core.ansatz import build_ansatz, count_resources
from src.core.fcidump import write_fcidump
from src.core.platforms import get_platform
from src.core.qedfci import (
    CavitySpec,
    expectation,
    photon_number_operator,
    photon_sector_profile,
    polaritonic_states,
    vertical_gap,
)

from .single_point_task import load_integrals, make_cavity

logger = logging.getLogger('Polariton.Tasks.Chemistry')


def run_integrals(config: ExperimentConfig, write: bool = True) -> Dict[str, Any]:
    """
    Task: H₂ integrals at the configured geometry, optionally dumped.

    Output:
        - e_hf, e_fci, e_nuc, h, dipole_nuc
        - fcidump / dipole paths when written
    """
    mi = load_integrals(config)
    bare = CavitySpec(omega=config.omega, coupling=0.0, n_b_max=0)
    fci, _ = polaritonic_states(mi, bare, k=1, spin='any') if mi.has_dipole else (None, None)

    result = {
        'r': config.r,
        'theta_z': config.theta_z,
        'n_orb': mi.n_orb,
        'n_electrons': mi.n_electrons,
        'e_nuc': mi.e_nuc,
        'e_hf': mi.e_hf,
        'e_fci': None if fci is None else float(fci.energies[0]),
        'h': mi.h.tolist(),
        'dipole_nuc': None if mi.dipole_nuc is None else mi.dipole_nuc.tolist(),
    }
    if write and mi.has_dipole:
        out = config.output_dir
        out.mkdir(parents=True, exist_ok=True)
        stem = f"h2_r{config.r:.4f}_t{config.theta_z:.4f}"
        dump, dipole = out / f'{stem}.FCIDUMP', out / f'{stem}.DIPOLE'
        write_fcidump(mi, dump, dipole)
        result.update({'fcidump': str(dump), 'dipole': str(dipole)})
    logger.info(f"  ✓ E_HF = {mi.e_hf}, E_FCI = {result['e_fci']}")
    return result


def run_qedfci(config: ExperimentConfig) -> Dict[str, Any]:
    """Task: lowest polaritonic states at one point with photon numbers and sectors."""
    mi = load_integrals(config)
    cav = make_cavity(config)
    spectrum, basis = polaritonic_states(mi, cav, k=config.n_states)
    number = photon_number_operator(basis)
    states = [{
        'energy': float(spectrum.energies[i]),
        'photon_number': expectation(number, spectrum.state(i)),
        'sectors': photon_sector_profile(spectrum.state(i), basis).tolist(),
    } for i in range(spectrum.k)]
    result = {
        'r': config.r,
        'theta_z': config.theta_z,
        'cavity': cav.to_dict(),
        'basis_size': basis.size,
        'states': states,
        'gap_12': vertical_gap(spectrum.energies) if spectrum.k >= 3 else None,
    }
    logger.info(f"  ✓ Energies: {np.round(spectrum.energies, 8).tolist()}")
    return result


def run_resources(config: ExperimentConfig) -> Dict[str, Any]:
    """Task: resource report per platform at the configured depth."""
    reports = {}
    n_orb = load_integrals(config).n_orb if config.fcidump else 2
    for platform in config.platforms:
        layout = get_platform(platform).layout(n_orb=n_orb, n_b_max=config.n_b_max, n_cut=config.qumode_cutoff)
        circuit = build_ansatz(platform, config.layers, layout)
        reports[platform] = count_resources(circuit).to_dict()
        reports[platform]['circuit'] = circuit.to_dict()
        logger.info(f"  ✓ {platform}: {reports[platform]['entangling_gates']} entangling gates, "
                    f"{reports[platform]['parameters']} parameters")
    return {'layers': config.layers, 'n_b_max': config.n_b_max, 'platforms': reports}
