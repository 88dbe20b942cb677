"""
Sweep tasks: depth sweeps and coupling sweeps at a fixed geometry.

Each platform's layer chain is warm-started: layer L begins from the best
parameters of layer L-1 padded with zeros, which reproduce the shallower
circuit exactly, so the best error cannot increase with depth.
"""

import logging
from typing import Any, Dict, List, Optional

from src.config import CHEMICAL_ACCURACY, ExperimentConfig
from src.storage import ResultStore

from .scan_task import dispatch, row_seed
from .single_point_task import ROW_COLUMNS, row_key, solve_point_safe

logger = logging.getLogger('Polariton.Tasks.Sweep')

COUPLING_COLUMNS = [
    'index', 'key', 'lambda', 'platform', 'min_layers', 'ensemble_error',
    'entangling_gates', 'parameters', 'error',
]


def _chain_key(payload: Dict[str, Any], layers: int) -> str:
    return row_key(payload['kind'], payload['r'], payload['theta_z'], payload['coupling'],
                   payload['platform'], layers)


def _resume(payload: Dict[str, Any], stored: Dict[str, Dict[str, Any]]) -> Dict[str, Any]:
    """
    Skip the leading layers already stored without error.

    The chain restarts from the parameters of the last stored layer, with
    the same indices and seeds an uninterrupted run would use.
    """
    start, incumbent = 0, None
    for layers in payload['layer_list']:
        row = stored.get(_chain_key(payload, layers))
        if row is None or row.get('error'):
            break
        start, incumbent = start + 1, row['params']
    return dict(payload, start=start, initial=incumbent)


def _chain(payload: Dict[str, Any]) -> List[Dict[str, Any]]:
    """Warm-started rows for one platform over an ascending layer list."""
    rows = []
    incumbent = payload.get('initial')
    start = payload.get('start', 0)
    for offset, layers in enumerate(payload['layer_list'][start:], start=start):
        row = solve_point_safe(dict(
            payload, layers=layers, initial=incumbent,
            index=payload['index'] + offset, seed=row_seed(payload['seed'], offset),
        ))
        rows.append(row)
        if row.get('error'):
            break
        incumbent = row['params']
        if payload.get('stop_below') is not None and row['ensemble_error'] < payload['stop_below']:
            break
    return rows


def run_layer_sweep(config: ExperimentConfig, store: Optional[ResultStore] = None) -> Dict[str, Any]:
    """Task: energy errors against circuit depth for each platform."""
    store = store or ResultStore(config.output_dir, 'layer_sweep', ROW_COLUMNS)
    base = config.to_dict()
    n = len(config.layer_list)
    stored = {row['key']: row for row in store.latest_rows() if 'key' in row}
    payloads = [_resume({
        'config': base, 'r': config.r, 'theta_z': config.theta_z, 'coupling': config.coupling,
        'platform': platform, 'layer_list': list(config.layer_list),
        'seed': row_seed(config.seed, i * n), 'index': i * n, 'kind': 'layers',
    }, stored) for i, platform in enumerate(config.platforms)]
    pending = [p for p in payloads if p['start'] < n]
    store.write_metadata({'config': base, 'mode': 'layer-sweep'})
    logger.info(f"Layer sweep: {len(payloads) * n} rows, "
                f"{sum(p['start'] for p in payloads)} already done")

    for rows in dispatch(pending, _chain, config.jobs):
        for row in rows:
            store.append(row)
            if not row.get('error'):
                logger.info(f"  ✓ {row['platform']} L={row['layers']}: ΔE_SA = {row['ensemble_error']:.3e} Ha")
    return {'rows': store.finalize(), 'path': str(store.json_path)}


def coupling_key(coupling: float, platform: str) -> str:
    return f"coupling|lambda={coupling:.8f}|{platform}"


def run_coupling_sweep(config: ExperimentConfig, store: Optional[ResultStore] = None) -> Dict[str, Any]:
    """
    Task: smallest depth reaching chemical accuracy for each coupling.

    Depths 0..max_layers are tried in order with warm starts, stopping at
    the first one below CHEMICAL_ACCURACY. Couplings already summarized in
    the store are skipped.
    """
    store = store or ResultStore(config.output_dir, 'coupling_sweep', COUPLING_COLUMNS)
    base = config.to_dict()
    layer_list = list(range(config.max_layers + 1))
    stride = len(layer_list)
    payloads = []
    for coupling in config.couplings:
        for platform in config.platforms:
            index = len(payloads) * stride
            payloads.append({
                'config': base, 'r': config.r, 'theta_z': config.theta_z, 'coupling': coupling,
                'platform': platform, 'layer_list': layer_list, 'stop_below': CHEMICAL_ACCURACY,
                'seed': row_seed(config.seed, index), 'index': index, 'kind': 'coupling',
            })
    done = store.completed_keys()
    pending = [p for p in payloads if coupling_key(p['coupling'], p['platform']) not in done]
    store.write_metadata({'config': base, 'mode': 'coupling-sweep'},
                         extra={'threshold': CHEMICAL_ACCURACY})
    logger.info(f"Coupling sweep: {len(payloads)} chains, {len(payloads) - len(pending)} already done")

    for rows in dispatch(pending, _chain, config.jobs):
        last = rows[-1]
        reached = not last.get('error') and last['ensemble_error'] < CHEMICAL_ACCURACY
        summary = {
            'index': rows[0]['index'],
            'key': coupling_key(last['lambda'], last['platform']),
            'lambda': last['lambda'],
            'platform': last['platform'],
            'min_layers': last['layers'] if reached else None,
            'ensemble_error': last.get('ensemble_error'),
            'entangling_gates': last.get('entangling_gates'),
            'parameters': last.get('parameters'),
            'error': last.get('error'),
            'chain': rows,
        }
        store.append(summary)
        logger.info(f"  ✓ λ={summary['lambda']:.3f} {summary['platform']}: min layers = {summary['min_layers']}")
    return {'rows': store.finalize(), 'path': str(store.json_path)}
