#!/usr/bin/env python3
"""
Polariton SA-VQE - Experiment Runner
Oracle, SA-VQE and benchmark drivers for H₂ in an optical cavity.

Usage:
    python polariton.py integrals --r 0.74
    python polariton.py qedfci --r 0.74 --lambda 0.05
    python polariton.py savqe --platform qudit --layers 2 --lambda 0.05
    python polariton.py scan-liac --lambda 0.1 --layers 3 --jobs 4
    python polariton.py scan-lici --lambda 0.08 --layers 3
    python polariton.py layer-sweep --lambda 0.05
    python polariton.py coupling-sweep
    python polariton.py sector-profile
    python polariton.py truncation
    python polariton.py resources --platform qubit --layers 2 --nbmax 3

Every flag has a KEY=value counterpart in the file given by --config.

Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import numpy as np

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from src.config import Config, ExperimentConfig
from src.core.errors import ConfigurationError, PolaritonError
from src.tasks import (
    run_coupling_sweep,
    run_integrals,
    run_layer_sweep,
    run_qedfci,
    run_resources,
    run_scan,
    run_sector_profile,
    run_single_point,
    run_truncation_study,
)

logger = logging.getLogger('Polariton.Runner')

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _json_default(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Not JSON serializable: {type(value).__name__}")


class ExperimentRunner:
    """Runs one experiment command and writes its JSON output."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.commands: Dict[str, Callable[[], Dict[str, Any]]] = {
            'integrals': lambda: run_integrals(config),
            'qedfci': lambda: run_qedfci(config),
            'savqe': lambda: run_single_point(config),
            'scan-liac': lambda: run_scan(config, mode='liac'),
            'scan-lici': lambda: run_scan(config, mode='lici'),
            'layer-sweep': lambda: run_layer_sweep(config),
            'coupling-sweep': lambda: run_coupling_sweep(config),
            'sector-profile': lambda: run_sector_profile(config),
            'truncation': lambda: run_truncation_study(config),
            'resources': lambda: run_resources(config),
        }
        logger.info("Experiment runner initialized")

    def output_path(self, command: str) -> Path:
        return self.config.output_dir / f"{command.replace('-', '_')}.json"

    def run(self, command: str) -> Dict[str, Any]:
        """
        Run a command and save its result.

        Args:
            command: One of the subcommand names

        Returns:
            The task result dict
        """
        if command not in self.commands:
            raise ConfigurationError(f"Unknown command '{command}'")
        start_time = time.time()

        logger.info(f"{'='*60}")
        logger.info(f"Command: {command}")
        logger.info(f"Platforms: {', '.join(self.config.platforms)} | seed {self.config.seed}")
        logger.info(f"{'='*60}")

        logger.info(f"Step 1/2: Running {command}...")
        result = self.commands[command]()
        logger.info("  ✓ Done")

        logger.info("Step 2/2: Saving results...")
        path = self.output_path(command)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w') as f:
            json.dump({'command': command, 'config': self.config.to_dict(), 'result': result},
                      f, indent=2, sort_keys=True, default=_json_default)
        logger.info(f"  ✓ Saved: {path}")

        logger.info(f"{'='*60}")
        logger.info(f"✓ COMPLETE in {time.time() - start_time:.1f}s")
        logger.info(f"{'='*60}")
        return result


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='KEY=value experiment file (flags override it)')
    molecule = common.add_argument_group('molecule')
    molecule.add_argument('--r', type=float, help='Bond length in Å (default: 0.74)')
    molecule.add_argument('--theta-z', dest='theta_z', type=float, help='Bond angle to the field in rad')
    molecule.add_argument('--fcidump', help='Integral dump instead of built-in H₂')
    molecule.add_argument('--dipole', help='Dipole companion file for --fcidump')
    cavity = common.add_argument_group('cavity')
    cavity.add_argument('--omega', type=float, help='Cavity frequency in Ha (default: 1.0)')
    cavity.add_argument('--lambda', dest='coupling', type=float, help='Coupling strength in a.u.')
    cavity.add_argument('--nbmax', dest='n_b_max', type=int, help='Photon cutoff for qubit/qudit and oracle')
    cavity.add_argument('--qumode-cutoff', dest='qumode_cutoff', type=int, help='Fock cutoff of the qumode')
    cavity.add_argument('--k', dest='n_states', type=int, help='Number of polaritonic states (default: 3)')
    circuit = common.add_argument_group('circuits')
    circuit.add_argument('--platform', dest='platforms', action='append',
                         choices=['qubit', 'qudit', 'qumode'], help='Platform (repeatable; default: all)')
    circuit.add_argument('--layers', type=int, help='Ansatz layers (default: 2)')
    grids = common.add_argument_group('grids')
    grids.add_argument('--r-min', dest='r_min', type=float)
    grids.add_argument('--r-max', dest='r_max', type=float)
    grids.add_argument('--r-steps', dest='r_steps', type=int)
    grids.add_argument('--theta-min', dest='theta_min', type=float)
    grids.add_argument('--theta-max', dest='theta_max', type=float)
    grids.add_argument('--theta-steps', dest='theta_steps', type=int)
    grids.add_argument('--lambdas', dest='couplings', type=lambda v: [float(x) for x in v.split(',')],
                       help='Comma-separated couplings')
    grids.add_argument('--layer-list', dest='layer_list', type=lambda v: [int(x) for x in v.split(',')],
                       help='Comma-separated ascending depths')
    grids.add_argument('--max-layers', dest='max_layers', type=int)
    grids.add_argument('--cutoffs', type=lambda v: [int(x) for x in v.split(',')],
                       help='Comma-separated ascending photon cutoffs')
    optimizer = common.add_argument_group('optimizer')
    optimizer.add_argument('--seed', type=int)
    optimizer.add_argument('--restarts', type=int)
    optimizer.add_argument('--max-evaluations', dest='max_evaluations', type=int)
    optimizer.add_argument('--energy-tol', dest='energy_tol', type=float)
    output = common.add_argument_group('output')
    output.add_argument('--out', help='Output directory (default: POLARITON_OUTPUT_DIR)')
    output.add_argument('--jobs', type=int, help='Worker processes for grid rows')
    output.add_argument('--verbose', action='store_true', help='DEBUG logging')

    parser = argparse.ArgumentParser(
        description='Polariton SA-VQE experiment runner',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python polariton.py savqe --platform qumode --layers 2 --lambda 0.05
  python polariton.py scan-liac --lambda 0.1 --layers 3 --jobs 4
  python polariton.py resources --layers 2
        """
    )
    sub = parser.add_subparsers(dest='command', required=True)
    helps = {
        'integrals': 'H₂/STO-3G integrals, E_HF and E_FCI; writes FCIDUMP + dipole file',
        'qedfci': 'Lowest polaritonic states at one point',
        'savqe': 'SA-VQE at one point',
        'scan-liac': 'Bond-length scan (avoided crossing)',
        'scan-lici': 'Bond-length x angle grid (conical intersection)',
        'layer-sweep': 'Energy errors against depth',
        'coupling-sweep': 'Minimum depth for chemical accuracy against coupling',
        'sector-profile': 'Photon-sector amplitude profile against coupling',
        'truncation': 'Photon-cutoff convergence of the oracle',
        'resources': 'Entangling gates and parameters per platform',
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


OVERRIDE_FIELDS = (
    'r', 'theta_z', 'fcidump', 'dipole', 'omega', 'coupling', 'n_b_max', 'qumode_cutoff',
    'n_states', 'platforms', 'layers', 'r_min', 'r_max', 'r_steps', 'theta_min', 'theta_max',
    'theta_steps', 'couplings', 'layer_list', 'max_layers', 'cutoffs', 'seed', 'restarts',
    'max_evaluations', 'energy_tol', 'out', 'jobs',
)


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else getattr(logging, Config.LOG_LEVEL, logging.INFO),
        format='%(asctime)s [%(levelname)s] %(name)s: %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    # Validate config
    try:
        Config.validate()
        overrides = {name: getattr(args, name) for name in OVERRIDE_FIELDS}
        config = ExperimentConfig.from_sources(args.config, overrides)
    except ConfigurationError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG

    try:
        ExperimentRunner(config).run(args.command)
    except ConfigurationError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except (PolaritonError, ArithmeticError, np.linalg.LinAlgError) as e:
        logger.error(f"Numeric failure: {e}", exc_info=True)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
