"""
FCIDUMP reader/writer with a companion dipole file.

Integral lines are `value i j k l` (1-based, chemists' notation):
`i j 0 0` for h, `0 0 0 0` for the nuclear repulsion. The dipole file uses
the same header and `value i j 0 0 x|y|z` lines plus one `nuc x y z` line.
"""

import logging
import re
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np

from src.core.errors import AbsentDipoleError, FCIDUMPParseError
from src.core.integrals import MolecularIntegrals

logger = logging.getLogger('Polariton.FCIDUMP')

FLOAT_FORMAT = '%23.16e'
COMPONENTS = ('x', 'y', 'z')

PathLike = Union[str, Path]


# =============================================================================
# WRITING
# =============================================================================

def write_head(fout, norb: int, nelec: int, ms2: int = 0):
    fout.write(' &FCI NORB=%4d,NELEC=%2d,MS2=%d,\n' % (norb, nelec, ms2))
    fout.write('  ORBSYM=%s\n' % ('1,' * norb))
    fout.write('  ISYM=1,\n')
    fout.write(' &END\n')


def write_eri(fout, g: np.ndarray, tol: float = 1e-15):
    n = g.shape[0]
    output_format = FLOAT_FORMAT + ' %4d %4d %4d %4d\n'
    for i in range(n):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(n):
                for l in range(k + 1):
                    if k * (k + 1) // 2 + l > ij:
                        continue
                    if abs(g[i, j, k, l]) > tol:
                        fout.write(output_format % (g[i, j, k, l], i + 1, j + 1, k + 1, l + 1))


def write_hcore(fout, h: np.ndarray, tol: float = 1e-15):
    output_format = FLOAT_FORMAT + ' %4d %4d    0    0\n'
    for i in range(h.shape[0]):
        for j in range(i + 1):
            if abs(h[i, j]) > tol:
                fout.write(output_format % (h[i, j], i + 1, j + 1))


def write_fcidump(mi: MolecularIntegrals, path: PathLike, dipole_path: Optional[PathLike] = None):
    """Write integrals (and optionally the dipole companion file)."""
    path = Path(path)
    with open(path, 'w') as fout:
        write_head(fout, mi.n_orb, mi.n_electrons)
        write_eri(fout, mi.g)
        write_hcore(fout, mi.h)
        fout.write((FLOAT_FORMAT + '    0    0    0    0\n') % mi.e_nuc)
    logger.info(f"Wrote integral dump: {path}")

    if dipole_path is not None:
        if not mi.has_dipole:
            raise AbsentDipoleError("No dipole integrals to write")
        dipole_path = Path(dipole_path)
        output_format = FLOAT_FORMAT + ' %4d %4d    0    0 %s\n'
        with open(dipole_path, 'w') as fout:
            write_head(fout, mi.n_orb, mi.n_electrons)
            for c, tag in enumerate(COMPONENTS):
                d = mi.dipole_e[c]
                for i in range(mi.n_orb):
                    for j in range(i + 1):
                        if abs(d[i, j]) > 1e-15:
                            fout.write(output_format % (d[i, j], i + 1, j + 1, tag))
            fout.write(('nuc ' + ' '.join([FLOAT_FORMAT] * 3) + '\n') % tuple(mi.dipole_nuc))
        logger.info(f"Wrote dipole file: {dipole_path}")


# =============================================================================
# READING
# =============================================================================

_HEADER_INT = re.compile(r'\b(NORB|NELEC|MS2)\s*=\s*(-?\d+)', re.IGNORECASE)


def _read_header(path: Path, lines) -> Tuple[Dict[str, int], int]:
    """Return header values and the index of the first body line."""
    if not lines or '&FCI' not in lines[0].upper():
        raise FCIDUMPParseError(path, 1, "missing &FCI header")
    header: Dict[str, int] = {}
    for index, line in enumerate(lines):
        for key, value in _HEADER_INT.findall(line):
            header[key.upper()] = int(value)
        stripped = line.strip().upper()
        if stripped.startswith('&END') or stripped == '/' or stripped.endswith('&END'):
            if 'NORB' not in header or 'NELEC' not in header:
                raise FCIDUMPParseError(path, index + 1, "header lacks NORB or NELEC")
            return header, index + 1
    raise FCIDUMPParseError(path, len(lines), "unterminated header (no &END)")


def _parse_float(token: str) -> float:
    return float(token.replace('D', 'E').replace('d', 'e'))


def _read_lines(path: Path):
    try:
        with open(path) as f:
            return f.read().splitlines()
    except FileNotFoundError:
        raise FCIDUMPParseError(path, 0, "file not found")


def load_fcidump(path: PathLike, dipole_path: Optional[PathLike] = None) -> MolecularIntegrals:
    """
    Read an integral dump and, if given, its dipole companion.

    Args:
        path: FCIDUMP file
        dipole_path: Dipole file; None yields integrals without dipoles

    Returns:
        MolecularIntegrals (e_hf is unknown and left as None)
    """
    path = Path(path)
    lines = _read_lines(path)
    header, start = _read_header(path, lines)
    n = header['NORB']
    h = np.zeros((n, n))
    g = np.zeros((n, n, n, n))
    e_nuc = 0.0

    for number, line in enumerate(lines[start:], start=start + 1):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) != 5:
            raise FCIDUMPParseError(path, number, f"expected 5 fields, got {len(tokens)}")
        try:
            value = _parse_float(tokens[0])
            i, j, k, l = (int(t) for t in tokens[1:])
        except ValueError as e:
            raise FCIDUMPParseError(path, number, str(e))
        if not all(0 <= x <= n for x in (i, j, k, l)):
            raise FCIDUMPParseError(path, number, f"orbital index out of range 0..{n}")

        if i and j and k and l:
            i, j, k, l = i - 1, j - 1, k - 1, l - 1
            for a, b, c, d in ((i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k)):
                g[a, b, c, d] = g[c, d, a, b] = value
        elif i and j and not (k or l):
            h[i - 1, j - 1] = h[j - 1, i - 1] = value
        elif not (i or j or k or l):
            e_nuc = value
        else:
            raise FCIDUMPParseError(path, number, f"unrecognised index pattern {tokens[1:]}")

    dipole_e = dipole_nuc = None
    if dipole_path is not None:
        dipole_e, dipole_nuc = load_dipole(dipole_path, n)

    logger.info(f"Loaded {path.name}: NORB={n}, NELEC={header['NELEC']}")
    return MolecularIntegrals(
        h=h, g=g, e_nuc=e_nuc, n_electrons=header['NELEC'],
        dipole_e=dipole_e, dipole_nuc=dipole_nuc,
        metadata={'source': str(path), 'ms2': header.get('MS2', 0)},
    )


def load_dipole(path: PathLike, n_orb: int) -> Tuple[np.ndarray, np.ndarray]:
    """Read `value i j 0 0 x|y|z` lines and the `nuc x y z` line."""
    path = Path(path)
    if not path.exists():
        raise AbsentDipoleError(f"Dipole file not found: {path}")
    lines = _read_lines(path)
    header, start = _read_header(path, lines)
    if header['NORB'] != n_orb:
        raise FCIDUMPParseError(path, 1, f"NORB={header['NORB']} does not match integrals ({n_orb})")

    dipole = np.zeros((3, n_orb, n_orb))
    nuclear = None
    for number, line in enumerate(lines[start:], start=start + 1):
        tokens = line.split()
        if not tokens:
            continue
        try:
            if tokens[0].lower() == 'nuc':
                if len(tokens) != 4:
                    raise FCIDUMPParseError(path, number, "nuc line needs three components")
                nuclear = np.array([_parse_float(t) for t in tokens[1:]])
                continue
            if len(tokens) != 6 or tokens[5].lower() not in COMPONENTS:
                raise FCIDUMPParseError(path, number, "expected `value i j 0 0 x|y|z`")
            value = _parse_float(tokens[0])
            i, j, k, l = (int(t) for t in tokens[1:5])
        except ValueError as e:
            raise FCIDUMPParseError(path, number, str(e))
        if k or l or not (1 <= i <= n_orb and 1 <= j <= n_orb):
            raise FCIDUMPParseError(path, number, "dipole indices must be `i j 0 0` within NORB")
        c = COMPONENTS.index(tokens[5].lower())
        dipole[c, i - 1, j - 1] = dipole[c, j - 1, i - 1] = value

    if nuclear is None:
        raise FCIDUMPParseError(path, len(lines), "missing `nuc x y z` line")
    return dipole, nuclear
