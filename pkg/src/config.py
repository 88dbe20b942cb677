import os
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv, dotenv_values

from src.core.errors import ConfigurationError

# Load environment variables
load_dotenv()

ANGSTROM_TO_BOHR = 1.8897259886
PLATFORMS = ('qubit', 'qudit', 'qumode')
CHEMICAL_ACCURACY = 1.6e-3


class Config:
    """Central configuration for the polariton toolkit."""

    # Get base directory (where config.py lives - src/)
    BASE_DIR = Path(__file__).parent.resolve()
    # Project root is one level up from src/
    PROJECT_ROOT = BASE_DIR.parent

    # =========================================================================
    # PATHS
    # =========================================================================
    OUTPUT_DIR = Path(os.getenv('POLARITON_OUTPUT_DIR', str(PROJECT_ROOT / 'results')))
    BASIS_FILE = Path(os.getenv('POLARITON_BASIS_FILE', str(BASE_DIR / 'data' / 'sto-3g.json')))

    # =========================================================================
    # ORACLE / REGISTER SIZES
    # =========================================================================
    BASIS_CAP = int(os.getenv('POLARITON_BASIS_CAP', 1_000_000))
    NB_MAX = int(os.getenv('POLARITON_NB_MAX', 3))
    QUMODE_CUTOFF = int(os.getenv('POLARITON_QUMODE_CUTOFF', 15))

    # =========================================================================
    # OPTIMIZER
    # =========================================================================
    RESTARTS = int(os.getenv('POLARITON_RESTARTS', 5))
    MAX_EVALUATIONS = int(os.getenv('POLARITON_MAX_EVALUATIONS', 5000))
    ENERGY_TOL = float(os.getenv('POLARITON_ENERGY_TOL', 1e-9))
    SEED = int(os.getenv('POLARITON_SEED', 7))

    # =========================================================================
    # RUNNER
    # =========================================================================
    JOBS = int(os.getenv('POLARITON_JOBS', 1))
    LOG_LEVEL = os.getenv('POLARITON_LOG_LEVEL', 'INFO').upper()

    @classmethod
    def validate(cls):
        """Validate ranges and create the output directory."""
        problems = []
        if cls.BASIS_CAP < 1:
            problems.append('POLARITON_BASIS_CAP')
        if cls.NB_MAX < 0:
            problems.append('POLARITON_NB_MAX')
        if cls.QUMODE_CUTOFF < 1:
            problems.append('POLARITON_QUMODE_CUTOFF')
        if cls.RESTARTS < 1:
            problems.append('POLARITON_RESTARTS')
        if cls.MAX_EVALUATIONS < 1:
            problems.append('POLARITON_MAX_EVALUATIONS')
        if cls.ENERGY_TOL <= 0:
            problems.append('POLARITON_ENERGY_TOL')
        if cls.JOBS < 1:
            problems.append('POLARITON_JOBS')
        if cls.LOG_LEVEL not in ('DEBUG', 'INFO', 'WARNING', 'ERROR'):
            problems.append('POLARITON_LOG_LEVEL')
        if not cls.BASIS_FILE.exists():
            problems.append('POLARITON_BASIS_FILE')

        if problems:
            raise ConfigurationError(f"Invalid config: {', '.join(problems)}")

        # Create directories if they don't exist
        cls.OUTPUT_DIR.mkdir(parents=True, exist_ok=True)


# =============================================================================
# EXPERIMENT CONFIG (config file + flag overrides)
# =============================================================================

def _floats(value: str) -> List[float]:
    return [float(v) for v in str(value).replace(';', ',').split(',') if v.strip()]


def _ints(value: str) -> List[int]:
    return [int(v) for v in str(value).replace(';', ',').split(',') if v.strip()]


def _names(value: str) -> List[str]:
    return [v.strip().lower() for v in str(value).replace(';', ',').split(',') if v.strip()]


# key in the config file -> (attribute, parser)
CONFIG_KEYS = {
    'R': ('r', float),
    'THETA_Z': ('theta_z', float),
    'OMEGA': ('omega', float),
    'LAMBDA': ('coupling', float),
    'NBMAX': ('n_b_max', int),
    'QUMODE_CUTOFF': ('qumode_cutoff', int),
    'K': ('n_states', int),
    'LAYERS': ('layers', int),
    'PLATFORM': ('platforms', _names),
    'PLATFORMS': ('platforms', _names),
    'R_MIN': ('r_min', float),
    'R_MAX': ('r_max', float),
    'R_STEPS': ('r_steps', int),
    'THETA_MIN': ('theta_min', float),
    'THETA_MAX': ('theta_max', float),
    'THETA_STEPS': ('theta_steps', int),
    'LAMBDAS': ('couplings', _floats),
    'LAYER_LIST': ('layer_list', _ints),
    'MAX_LAYERS': ('max_layers', int),
    'CUTOFFS': ('cutoffs', _ints),
    'SEED': ('seed', int),
    'RESTARTS': ('restarts', int),
    'MAX_EVALUATIONS': ('max_evaluations', int),
    'ENERGY_TOL': ('energy_tol', float),
    'OUT': ('out', str),
    'JOBS': ('jobs', int),
    'FCIDUMP': ('fcidump', str),
    'DIPOLE': ('dipole', str),
}


@dataclass
class ExperimentConfig:
    """Settings for one experiment run (single point, scan or sweep)."""
    # molecule
    r: float = 0.74                     # Å
    theta_z: float = 0.0                # rad
    fcidump: Optional[str] = None
    dipole: Optional[str] = None
    # cavity
    omega: float = 1.0                  # Ha
    coupling: float = 0.05              # a.u.
    n_b_max: int = field(default_factory=lambda: Config.NB_MAX)
    qumode_cutoff: int = field(default_factory=lambda: Config.QUMODE_CUTOFF)
    n_states: int = 3
    # circuits
    platforms: List[str] = field(default_factory=lambda: list(PLATFORMS))
    layers: int = 2
    # grids
    r_min: float = 0.4
    r_max: float = 1.0
    r_steps: int = 31
    theta_min: float = 0.0
    theta_max: float = math.pi
    theta_steps: int = 15
    couplings: List[float] = field(default_factory=lambda: [0.0, 0.025, 0.05, 0.1, 0.15, 0.2, 0.25])
    layer_list: List[int] = field(default_factory=lambda: [0, 1, 2, 3, 4])
    max_layers: int = 4
    cutoffs: List[int] = field(default_factory=lambda: [3, 15])
    # optimizer
    seed: int = field(default_factory=lambda: Config.SEED)
    restarts: int = field(default_factory=lambda: Config.RESTARTS)
    max_evaluations: int = field(default_factory=lambda: Config.MAX_EVALUATIONS)
    energy_tol: float = field(default_factory=lambda: Config.ENERGY_TOL)
    # output
    out: Optional[str] = None
    jobs: int = field(default_factory=lambda: Config.JOBS)

    @classmethod
    def from_sources(
        cls,
        config_file: Optional[str] = None,
        overrides: Optional[Dict[str, Any]] = None
    ) -> 'ExperimentConfig':
        """
        Build a config from defaults, then a KEY=value file, then flags.

        Args:
            config_file: Optional path to a dotenv-style experiment file
            overrides: Attribute values from the command line (None = unset)
        """
        values: Dict[str, Any] = {}

        if config_file:
            path = Path(config_file)
            if not path.exists():
                raise ConfigurationError(f"Config file not found: {path}")
            for key, raw in dotenv_values(path).items():
                name = key.strip().upper()
                if name not in CONFIG_KEYS:
                    raise ConfigurationError(f"Unknown config key '{key}' in {path}")
                if raw is None or raw == '':
                    continue
                attr, parse = CONFIG_KEYS[name]
                try:
                    values[attr] = parse(raw)
                except ValueError as e:
                    raise ConfigurationError(f"Bad value for {name}: {raw!r} ({e})")

        for attr, value in (overrides or {}).items():
            if value is not None:
                values[attr] = value

        config = cls(**values)
        config.validate()
        return config

    def validate(self) -> None:
        problems = []
        if self.r <= 0:
            problems.append('r must be > 0')
        if self.omega <= 0:
            problems.append('omega must be > 0')
        if self.coupling < 0:
            problems.append('lambda must be >= 0')
        if any(c < 0 for c in self.couplings):
            problems.append('lambdas must be >= 0')
        if self.n_b_max < 0:
            problems.append('nbmax must be >= 0')
        if self.qumode_cutoff < 1:
            problems.append('qumode cutoff must be >= 1')
        if self.n_states < 1:
            problems.append('k must be >= 1')
        if self.layers < 0 or self.max_layers < 0:
            problems.append('layers must be >= 0')
        if not self.platforms or any(p not in PLATFORMS for p in self.platforms):
            problems.append(f"platforms must be a subset of {', '.join(PLATFORMS)}")
        if self.r_steps < 1 or self.theta_steps < 1:
            problems.append('steps must be >= 1')
        if self.r_min <= 0 or self.r_max < self.r_min:
            problems.append('r range must be positive and nonempty')
        if self.theta_max < self.theta_min:
            problems.append('theta range must be nonempty')
        if not self.couplings:
            problems.append('lambdas must be nonempty')
        if not self.layer_list or sorted(self.layer_list) != list(self.layer_list):
            problems.append('layer list must be nonempty and ascending')
        if not self.cutoffs or sorted(self.cutoffs) != list(self.cutoffs):
            problems.append('cutoffs must be nonempty and ascending')
        if self.restarts < 1 or self.max_evaluations < 1 or self.energy_tol <= 0:
            problems.append('optimizer settings must be positive')
        if self.jobs < 1:
            problems.append('jobs must be >= 1')
        if self.dipole and not self.fcidump:
            problems.append('dipole file given without an integral dump')

        if problems:
            raise ConfigurationError('; '.join(problems))

    @property
    def output_dir(self) -> Path:
        return Path(self.out) if self.out else Config.OUTPUT_DIR

    def r_grid(self) -> List[float]:
        if self.r_steps == 1:
            return [self.r_min]
        step = (self.r_max - self.r_min) / (self.r_steps - 1)
        return [self.r_min + i * step for i in range(self.r_steps)]

    def theta_grid(self) -> List[float]:
        if self.theta_steps == 1:
            return [self.theta_min]
        step = (self.theta_max - self.theta_min) / (self.theta_steps - 1)
        return [self.theta_min + i * step for i in range(self.theta_steps)]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
