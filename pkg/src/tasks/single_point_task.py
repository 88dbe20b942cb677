"""
Single-point task: oracle + SA-VQE at one geometry, coupling and platform.

`solve_point` takes and returns plain dicts so it can run in worker
processes. Scans and sweeps all go through it.
"""

import logging
import time
from typing import Any, Dict, Optional, Sequence, Tuple

from src.config import Config, ExperimentConfig
from src.core.ansatz import build_ansatz, count_resources, prepare_initial_states
from src.core.fcidump import load_fcidump
from src.core.integrals import MolecularIntegrals, h2_integrals
from src.core.mappings import RegisterLayout, assemble_platform_hamiltonian
from src.core.platforms import get_platform
from src.core.qedfci import CavitySpec, polaritonic_states
from src.core.savqe import SAVQEOptions, diagnostics, encode_from_hybrid, optimize

logger = logging.getLogger('Polariton.Tasks.SinglePoint')

ROW_COLUMNS = [
    'index', 'key', 'r', 'theta_z', 'lambda', 'platform', 'layers', 'seed',
    'oracle_energies', 'energies', 'ensemble_error', 'max_state_error',
    'max_infidelity', 'gap_error', 'photon_numbers', 'oracle_photon_numbers',
    'entangling_gates', 'parameters', 'evaluations', 'converged', 'wall_time', 'error',
]


def load_integrals(config: ExperimentConfig, r: Optional[float] = None, theta_z: Optional[float] = None) -> MolecularIntegrals:
    """Integrals from the configured dump, or built-in H₂ at (r, θ_z)."""
    if config.fcidump:
        return load_fcidump(config.fcidump, config.dipole)
    return h2_integrals(config.r if r is None else r,
                        config.theta_z if theta_z is None else theta_z,
                        Config.BASIS_FILE)


def make_cavity(config: ExperimentConfig, coupling: Optional[float] = None, n_b_max: Optional[int] = None) -> CavitySpec:
    return CavitySpec(
        omega=config.omega,
        coupling=config.coupling if coupling is None else coupling,
        n_b_max=config.n_b_max if n_b_max is None else n_b_max,
    )


def platform_problem(
    mi: MolecularIntegrals,
    cav: CavitySpec,
    platform: str,
    qumode_cutoff: int
) -> Tuple[RegisterLayout, Any]:
    """Register layout and mapped Hamiltonian for one platform."""
    layout = get_platform(platform).layout(n_orb=mi.n_orb, n_b_max=cav.n_b_max, n_cut=qumode_cutoff)
    H = assemble_platform_hamiltonian(mi, cav.with_cutoff(layout.photon_cutoff), layout)
    return layout, H


def row_key(kind: str, r: float, theta_z: float, coupling: float, platform: str, layers: int) -> str:
    return f"{kind}|r={r:.8f}|theta={theta_z:.8f}|lambda={coupling:.8f}|{platform}|L={layers}"


def solve_point(payload: Dict[str, Any]) -> Dict[str, Any]:
    """
    Run the oracle and SA-VQE for one grid point.

    Payload keys: config (dict), r, theta_z, coupling, platform, layers,
    seed, index, kind, and optionally initial (warm-start parameters).

    Returns:
        Flat result row with a nested 'detail' section
    """
    start = time.time()
    config = ExperimentConfig(**payload['config'])
    r, theta_z, coupling = payload['r'], payload['theta_z'], payload['coupling']
    platform, layers = payload['platform'], payload['layers']

    mi = load_integrals(config, r, theta_z)
    cav = make_cavity(config, coupling)
    layout, H = platform_problem(mi, cav, platform, config.qumode_cutoff)
    # oracle over the register's own photon space
    spectrum, basis = polaritonic_states(mi, cav.with_cutoff(layout.photon_cutoff), k=config.n_states)

    circuit = build_ansatz(platform, layers, layout)
    states = prepare_initial_states(layout, mi.n_electrons)[:, :config.n_states]
    references = encode_from_hybrid(spectrum.vectors, layout, basis)

    opts = SAVQEOptions(
        energy_tol=config.energy_tol, max_evaluations=config.max_evaluations,
        restarts=config.restarts, seed=payload['seed'],
    )
    result = optimize(circuit, H, states, opts, initial=payload.get('initial'), references=references)
    diag = diagnostics(result, spectrum, basis, layout)
    resources = count_resources(circuit)

    detail = {
        'savqe': result.to_dict(),
        'diagnostics': diag.to_dict(),
        'resources': resources.to_dict(),
    }
    if layout.photon_cutoff != cav.n_b_max:
        # same states against the oracle at the configured photon cutoff
        narrow, narrow_basis = polaritonic_states(mi, cav, k=config.n_states)
        detail['diagnostics_nb_max'] = diagnostics(result, narrow, narrow_basis, layout).to_dict()

    return {
        'index': payload['index'],
        'key': row_key(payload['kind'], r, theta_z, coupling, platform, layers),
        'r': r,
        'theta_z': theta_z,
        'lambda': coupling,
        'platform': platform,
        'layers': layers,
        'seed': payload['seed'],
        'oracle_energies': spectrum.energies.tolist(),
        'energies': result.energies.tolist(),
        'ensemble_error': diag.ensemble_error,
        'max_state_error': diag.max_state_error,
        'max_infidelity': diag.max_infidelity,
        'gap_error': diag.gap_error,
        'photon_numbers': diag.photon_numbers,
        'oracle_photon_numbers': diag.reference_photon_numbers,
        'entangling_gates': resources.entangling_gates,
        'parameters': resources.parameters,
        'evaluations': result.evaluations,
        'converged': result.converged,
        'wall_time': time.time() - start,
        'error': None,
        'params': result.params.tolist(),
        'detail': detail,
    }


def solve_point_safe(payload: Dict[str, Any]) -> Dict[str, Any]:
    """solve_point that records failures in the row instead of raising."""
    try:
        return solve_point(payload)
    except Exception as e:
        logger.error(f"Row {payload.get('index')} failed: {e}", exc_info=True)
        return {
            'index': payload['index'],
            'key': row_key(payload['kind'], payload['r'], payload['theta_z'], payload['coupling'],
                           payload['platform'], payload['layers']),
            'r': payload['r'],
            'theta_z': payload['theta_z'],
            'lambda': payload['coupling'],
            'platform': payload['platform'],
            'layers': payload['layers'],
            'seed': payload['seed'],
            'converged': False,
            'error': f"{type(e).__name__}: {e}",
        }


def run_single_point(config: ExperimentConfig, platforms: Optional[Sequence[str]] = None) -> Dict[str, Any]:
    """Task: SA-VQE at the configured point for each platform (savqe command)."""
    rows = []
    for i, platform in enumerate(platforms or config.platforms):
        logger.info(f"Running SA-VQE: {platform}, {config.layers} layers")
        row = solve_point({
            'config': config.to_dict(), 'r': config.r, 'theta_z': config.theta_z,
            'coupling': config.coupling, 'platform': platform, 'layers': config.layers,
            'seed': config.seed, 'index': i, 'kind': 'point',
        })
        logger.info(f"  ✓ {platform}: ΔE_SA = {row['ensemble_error']:.3e} Ha, "
                    f"max ΔE_k = {row['max_state_error']:.3e} Ha")
        rows.append(row)
    return {'rows': rows}
