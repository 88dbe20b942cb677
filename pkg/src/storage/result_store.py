"""
Result store for scans and sweeps.

Rows are appended to a JSON-lines file and flushed one at a time, so an
interrupted run can resume by skipping the keys already on disk. A CSV
mirror carries the flat columns for plotting; `finalize()` writes the full
table as JSON ordered by row index, keeping the last row stored per key.
"""

import csv
import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Set

logger = logging.getLogger('Polariton.Storage')

SCHEMA_VERSION = 1

# Fields that change between otherwise identical runs
VOLATILE_FIELDS = ('wall_time',)


def _flat(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return ';'.join(f'{v:.12g}' if isinstance(v, float) else str(v) for v in value)
    if isinstance(value, float):
        return f'{value:.12g}'
    return '' if value is None else value


class ResultStore:
    """Append-only table of result rows for one experiment."""

    def __init__(self, directory: Path, name: str, columns: Iterable[str]):
        """
        Args:
            directory: Output directory (created if missing)
            name: Table name; files are <name>.jsonl, <name>.csv, <name>.json
            columns: Flat columns mirrored to CSV, in order
        """
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.name = name
        self.columns = list(columns)
        self.jsonl_path = self.directory / f'{name}.jsonl'
        self.csv_path = self.directory / f'{name}.csv'
        self.json_path = self.directory / f'{name}.json'
        self.metadata_path = self.directory / f'{name}.meta.json'

    # =========================================================================
    # ROWS
    # =========================================================================

    def rows(self) -> List[Dict[str, Any]]:
        if not self.jsonl_path.exists():
            return []
        rows = []
        with open(self.jsonl_path) as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                try:
                    rows.append(json.loads(line))
                except json.JSONDecodeError:
                    # partial line from an interrupted write
                    logger.warning(f"Skipping unreadable row in {self.jsonl_path.name}")
        return rows

    def completed_keys(self) -> Set[str]:
        return {row['key'] for row in self.rows() if 'key' in row}

    def latest_rows(self) -> List[Dict[str, Any]]:
        """Stored rows with only the last one kept for each key."""
        latest: Dict[Any, Dict[str, Any]] = {}
        for position, row in enumerate(self.rows()):
            latest[row.get('key', position)] = row
        return list(latest.values())

    def append(self, row: Dict[str, Any]):
        """Write one row to the JSON-lines file and the CSV mirror."""
        row = dict(row, schema_version=SCHEMA_VERSION)
        with open(self.jsonl_path, 'a') as f:
            f.write(json.dumps(row, sort_keys=True) + '\n')
            f.flush()

        new_csv = not self.csv_path.exists()
        with open(self.csv_path, 'a', newline='') as f:
            writer = csv.DictWriter(f, fieldnames=self.columns, extrasaction='ignore')
            if new_csv:
                writer.writeheader()
            writer.writerow({c: _flat(row.get(c)) for c in self.columns})
            f.flush()
        logger.debug(f"Row written: {row.get('key')}")

    def finalize(self) -> List[Dict[str, Any]]:
        """Write the ordered table and rebuild the CSV in the same order."""
        rows = sorted(self.latest_rows(), key=lambda r: (r.get('index', 0), r.get('key', '')))
        with open(self.json_path, 'w') as f:
            json.dump({'schema_version': SCHEMA_VERSION, 'rows': rows}, f, indent=2, sort_keys=True)

        with open(self.csv_path, 'w', newline='') as f:
            writer = csv.DictWriter(f, fieldnames=self.columns, extrasaction='ignore')
            writer.writeheader()
            for row in rows:
                writer.writerow({c: _flat(row.get(c)) for c in self.columns})
        logger.info(f"Saved {len(rows)} rows: {self.json_path}")
        return rows

    # =========================================================================
    # METADATA
    # =========================================================================

    def write_metadata(self, metadata: Dict[str, Any], extra: Optional[Dict[str, Any]] = None):
        payload = {
            'schema_version': SCHEMA_VERSION,
            'table': self.name,
            'created_at': datetime.now(timezone.utc).isoformat(),
            **metadata,
            **(extra or {}),
        }
        with open(self.metadata_path, 'w') as f:
            json.dump(payload, f, indent=2, sort_keys=True, default=str)


def strip_volatile(row: Any) -> Any:
    """Row without timing fields at any depth, for reproducibility comparisons."""
    if isinstance(row, dict):
        return {k: strip_volatile(v) for k, v in row.items() if k not in VOLATILE_FIELDS}
    if isinstance(row, list):
        return [strip_volatile(v) for v in row]
    return row
