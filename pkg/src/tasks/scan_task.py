"""
Scan task: LIAC bond-length scans and LICI (r, θ_z) grids.

Rows are independent and go to a process pool; this process is the only
writer, appending each row as it completes. Rows already in the store are
skipped, so an interrupted scan resumes where it stopped.
"""

import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Any, Callable, Dict, Iterable, List, Optional

from src.config import ExperimentConfig
from src.core.errors import DomainError
from src.storage import ResultStore

from .single_point_task import ROW_COLUMNS, row_key, solve_point_safe

logger = logging.getLogger('Polariton.Tasks.Scan')

SEED_STRIDE = 1000


def row_seed(seed: int, index: int) -> int:
    return seed + SEED_STRIDE * index


def scan_payloads(config: ExperimentConfig, mode: str) -> List[Dict[str, Any]]:
    """One payload per (grid point, platform), in a fixed order."""
    if mode == 'liac':
        points = [(r, config.theta_z) for r in config.r_grid()]
    elif mode == 'lici':
        points = [(r, t) for r in config.r_grid() for t in config.theta_grid()]
    else:
        raise DomainError(f"Scan mode must be 'liac' or 'lici', got {mode}")

    base = config.to_dict()
    payloads = []
    for r, theta_z in points:
        for platform in config.platforms:
            index = len(payloads)
            payloads.append({
                'config': base, 'r': r, 'theta_z': theta_z, 'coupling': config.coupling,
                'platform': platform, 'layers': config.layers,
                'seed': row_seed(config.seed, index), 'index': index, 'kind': mode,
            })
    return payloads


def dispatch(
    payloads: Iterable[Dict[str, Any]],
    worker: Callable[[Dict[str, Any]], Any],
    jobs: int
) -> Iterable[Any]:
    """Yield worker results, in order for one job, as completed otherwise."""
    payloads = list(payloads)
    if jobs <= 1 or len(payloads) <= 1:
        for payload in payloads:
            yield worker(payload)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(worker, p) for p in payloads]
        for future in as_completed(futures):
            yield future.result()


def run_scan(config: ExperimentConfig, mode: str = 'liac', store: Optional[ResultStore] = None) -> Dict[str, Any]:
    """
    Task: SA-VQE over a LIAC or LICI grid.

    Returns:
        Dict with the ordered rows and the count of failed rows
    """
    store = store or ResultStore(config.output_dir, f'scan_{mode}', ROW_COLUMNS)
    payloads = scan_payloads(config, mode)
    done = store.completed_keys()
    pending = [
        p for p in payloads
        if row_key(mode, p['r'], p['theta_z'], p['coupling'], p['platform'], p['layers']) not in done
    ]
    store.write_metadata({'config': config.to_dict(), 'mode': mode}, extra={
        'r_grid': config.r_grid(),
        'theta_grid': config.theta_grid() if mode == 'lici' else [config.theta_z],
        'seed_stride': SEED_STRIDE,
        'rows_total': len(payloads),
    })
    logger.info(f"{mode.upper()} scan: {len(payloads)} rows, {len(payloads) - len(pending)} already done")

    failed = 0
    for row in dispatch(pending, solve_point_safe, config.jobs):
        store.append(row)
        if row.get('error'):
            failed += 1
            logger.warning(f"Row {row['index']} ({row['platform']}, r={row['r']:.4f}) failed: {row['error']}")
        elif not row.get('converged'):
            logger.warning(f"Row {row['index']} ({row['platform']}, r={row['r']:.4f}) not converged")
        else:
            logger.info(f"  ✓ row {row['index']}: {row['platform']} r={row['r']:.4f} "
                        f"θ={row['theta_z']:.4f} max ΔE_k={row['max_state_error']:.2e}")

    rows = store.finalize()
    return {'rows': rows, 'failed': failed, 'path': str(store.json_path)}
