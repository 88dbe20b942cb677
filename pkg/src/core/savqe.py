"""
State-averaged VQE.

One circuit acts on N_S orthonormal initial states; the parameters minimize
the mean energy. Individual states come from diagonalizing the N_S x N_S
Hamiltonian block spanned by the optimized trial states.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import minimize

from src.config import Config
from src.core.ansatz import Circuit
from src.core.errors import DomainError, LeakageError, ShapeError, StateCountError
from src.core.mappings import RegisterLayout, physical_subspace, register_operators
from src.core.qedfci import (
    DEGENERACY_TOL,
    HybridBasis,
    OperatorMatrix,
    Spectrum,
    _clusters,
    align_degenerate,
    expectation,
    photon_number_operator,
    vertical_gap,
)

logger = logging.getLogger('Polariton.SAVQE')

LEAKAGE_TOL = 1e-8
ORTHONORMAL_TOL = 1e-10

HamiltonianLike = Union[OperatorMatrix, np.ndarray]


@dataclass
class SAVQEOptions:
    energy_tol: float = field(default_factory=lambda: Config.ENERGY_TOL)
    max_evaluations: int = field(default_factory=lambda: Config.MAX_EVALUATIONS)
    restarts: int = field(default_factory=lambda: Config.RESTARTS)
    seed: int = field(default_factory=lambda: Config.SEED)
    perturbation: float = 0.5

    def __post_init__(self):
        if self.energy_tol <= 0 or self.max_evaluations < 1 or self.restarts < 1:
            raise DomainError("energy_tol, max_evaluations and restarts must be positive")


@dataclass
class SAVQEResult:
    params: np.ndarray
    ensemble_energy: float
    subspace_matrix: np.ndarray
    energies: np.ndarray
    states: np.ndarray
    photon_numbers: np.ndarray
    evaluations: int
    restarts: int
    converged: bool
    trace: List[float] = field(default_factory=list)
    platform: str = ''
    n_layers: int = 0
    wall_time: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'platform': self.platform,
            'n_layers': self.n_layers,
            'params': self.params.tolist(),
            'ensemble_energy': self.ensemble_energy,
            'subspace_matrix': {
                'real': np.real(self.subspace_matrix).tolist(),
                'imag': np.imag(self.subspace_matrix).tolist(),
            },
            'energies': self.energies.tolist(),
            'photon_numbers': self.photon_numbers.tolist(),
            'evaluations': self.evaluations,
            'restarts': self.restarts,
            'converged': self.converged,
            'trace': list(self.trace),
            'wall_time': self.wall_time,
        }


def _hermitian_matrix(h: HamiltonianLike) -> np.ndarray:
    if isinstance(h, OperatorMatrix):
        if not h.hermitian:
            raise DomainError(f"SA-VQE needs a hermitian Hamiltonian, got {h.label}")
        return h.matrix
    M = np.asarray(h)
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    if M.ndim != 2 or M.shape[0] != M.shape[1] or np.max(np.abs(M - M.conj().T)) > 1e-12 * scale:
        raise DomainError("SA-VQE needs a square hermitian Hamiltonian")
    return M


def _check_orthonormal(states: np.ndarray):
    gram = states.conj().T @ states
    error = np.max(np.abs(gram - np.eye(gram.shape[0])))
    if error > ORTHONORMAL_TOL:
        raise DomainError(f"Initial states are not orthonormal (Gram error {error:.2e})")


def state_energies(circuit: Circuit, params, H: HamiltonianLike, initial_states: np.ndarray) -> np.ndarray:
    """<ψ_k(θ)|H|ψ_k(θ)> for every initial state."""
    M = _hermitian_matrix(H)
    trial = circuit.apply(initial_states, params)
    return np.real(np.sum(trial.conj() * (M @ trial), axis=0))


def sa_energy(
    circuit: Circuit,
    params,
    H: HamiltonianLike,
    initial_states: np.ndarray,
    weights: Optional[Sequence[float]] = None
) -> float:
    """Weighted ensemble energy, equal weights by default."""
    energies = state_energies(circuit, params, H, initial_states)
    if weights is None:
        return float(np.mean(energies))
    weights = np.asarray(weights, dtype=float)
    if weights.shape != energies.shape:
        raise StateCountError(f"{len(weights)} weights for {len(energies)} states")
    return float(weights @ energies)


# =============================================================================
# OPTIMIZATION
# =============================================================================

class _EvaluationCap(Exception):
    pass


class _Tracker:
    """Objective wrapper that counts calls and keeps the best point seen."""

    def __init__(self, fn, cap: int):
        self.fn = fn
        self.cap = cap
        self.calls = 0
        self.best_value = np.inf
        self.best_x: Optional[np.ndarray] = None

    def __call__(self, x):
        if self.calls >= self.cap:
            raise _EvaluationCap()
        self.calls += 1
        value = self.fn(x)
        if value < self.best_value:
            self.best_value = value
            self.best_x = np.array(x, dtype=float)
        return value


def _start_vector(n_params: int, initial: Optional[Sequence[float]]) -> np.ndarray:
    x0 = np.zeros(n_params)
    if initial is not None:
        initial = np.asarray(initial, dtype=float)
        if initial.size > n_params:
            raise ShapeError(f"Warm start has {initial.size} values for {n_params} parameters")
        x0[:initial.size] = initial
    return x0


def optimize(
    circuit: Circuit,
    H: HamiltonianLike,
    initial_states: np.ndarray,
    opts: Optional[SAVQEOptions] = None,
    initial: Optional[Sequence[float]] = None,
    references: Optional[np.ndarray] = None
) -> SAVQEResult:
    """
    Minimize the ensemble energy with SLSQP from several starting points.

    Restart 0 begins at `initial` (zero-padded for new slots) or at zero;
    later restarts perturb that point with seeded normal noise. The best
    point over all restarts is returned; hitting the evaluation cap is
    reported through `converged`.
    """
    opts = opts or SAVQEOptions()
    start = time.time()
    M = _hermitian_matrix(H)
    _check_orthonormal(initial_states)

    n = circuit.n_params
    x_init = _start_vector(n, initial)
    bounds = [(-np.pi, np.pi)] * n

    def objective(x):
        return sa_energy(circuit, x, M, initial_states)

    best_x, best_value = x_init, objective(x_init)
    evaluations, converged, trace = 1, n == 0, []

    restarts = opts.restarts if n else 0
    for k in range(restarts):
        if k == 0:
            x0 = x_init
        else:
            rng = np.random.default_rng(opts.seed + k)
            x0 = np.clip(x_init + rng.normal(scale=opts.perturbation, size=n), -np.pi, np.pi)

        tracker = _Tracker(objective, opts.max_evaluations)
        success = False
        try:
            res = minimize(
                tracker, x0, method='SLSQP', bounds=bounds,
                options={'ftol': opts.energy_tol, 'maxiter': opts.max_evaluations},
            )
            success = bool(res.success)
        except _EvaluationCap:
            logger.debug(f"Restart {k}: evaluation cap {opts.max_evaluations} reached")

        evaluations += tracker.calls
        converged = converged or success
        if tracker.best_value < best_value:
            best_value, best_x = tracker.best_value, tracker.best_x
        trace.append(float(best_value))
        logger.debug(f"Restart {k}: E_SA = {tracker.best_value:.10f} ({tracker.calls} evals)")

    if not converged:
        logger.warning(f"SA-VQE did not converge within {opts.max_evaluations} evaluations per restart")

    energies, states, block = subspace_resolve(circuit, best_x, M, initial_states, references=references)
    photons = register_operators(circuit.layout)['photons']
    photon_numbers = np.real(np.sum(states.conj() * (photons @ states), axis=0))

    result = SAVQEResult(
        params=best_x, ensemble_energy=float(best_value), subspace_matrix=block,
        energies=energies, states=states, photon_numbers=photon_numbers,
        evaluations=evaluations, restarts=restarts, converged=converged, trace=trace,
        platform=circuit.platform, n_layers=circuit.n_layers,
        wall_time=time.time() - start,
    )
    logger.info(f"SA-VQE {circuit.platform} L={circuit.n_layers}: E_SA = {best_value:.10f}, "
                f"{evaluations} evaluations")
    return result


def subspace_resolve(
    circuit: Circuit,
    params,
    H: HamiltonianLike,
    initial_states: np.ndarray,
    references: Optional[np.ndarray] = None
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Diagonalize H within the span of the trial states.

    Degenerate eigenvalues are split by overlap with `references` (register
    vectors, columns) when given, otherwise by input-state order.

    Returns:
        (ascending energies, rotated register states, N_S x N_S block)
    """
    M = _hermitian_matrix(H)
    trial = circuit.apply(initial_states, params)
    block = trial.conj().T @ M @ trial
    block = 0.5 * (block + block.conj().T)
    w, v = eigh(block)
    v = v.astype(complex)

    candidates = np.eye(len(w), dtype=complex) if references is None else trial.conj().T @ references
    for group in _clusters(w, DEGENERACY_TOL):
        if len(group) > 1:
            v[:, group] = align_degenerate(v[:, group], candidates)
    return w, trial @ v, block


# =============================================================================
# REPRESENTATION CHANGES
# =============================================================================

@dataclass
class DecodedState:
    amplitudes: np.ndarray
    truncation_deficit: float
    leakage: float


def _check_basis(layout: RegisterLayout, basis: HybridBasis):
    if basis.n_spin_orbitals != layout.n_ferm:
        raise ShapeError(f"Hybrid basis has {basis.n_spin_orbitals} spin-orbitals, register {layout.n_ferm}")


def decode_to_hybrid(state: np.ndarray, layout: RegisterLayout, basis: HybridBasis) -> DecodedState:
    """
    Re-index a register state onto the QED-FCI basis.

    Photon levels the basis lacks count as truncation deficit; missing ones
    are zero. Weight outside the N_e-electron, validly encoded subspace is
    leakage and fails above LEAKAGE_TOL.
    """
    _check_basis(layout, basis)
    state = np.asarray(state)
    if state.shape[0] != layout.dim:
        raise ShapeError(f"State dim {state.shape[0]} != register dim {layout.dim}")
    columns = state.reshape(layout.dim, -1)

    physical = physical_subspace(layout, basis.n_electrons)
    kept = columns[physical].reshape(basis.n_determinants, layout.n_photon_levels, -1)
    leakage = float(np.sum(np.abs(columns) ** 2) - np.sum(np.abs(kept) ** 2))
    if leakage > LEAKAGE_TOL:
        raise LeakageError(leakage, LEAKAGE_TOL)

    levels = min(layout.n_photon_levels, basis.n_photon_levels)
    out = np.zeros((basis.n_determinants, basis.n_photon_levels, columns.shape[1]), dtype=complex)
    out[:, :levels] = kept[:, :levels]
    deficit = float(np.sum(np.abs(kept[:, levels:]) ** 2))

    amplitudes = out.reshape(basis.size, -1)
    if state.ndim == 1:
        amplitudes = amplitudes[:, 0]
    return DecodedState(amplitudes=amplitudes, truncation_deficit=deficit, leakage=max(leakage, 0.0))


def encode_from_hybrid(vector: np.ndarray, layout: RegisterLayout, basis: HybridBasis) -> np.ndarray:
    """Place QED-FCI amplitudes (vector or columns) on a register."""
    _check_basis(layout, basis)
    vector = np.asarray(vector)
    if vector.shape[0] != basis.size:
        raise ShapeError(f"Vector length {vector.shape[0]} != basis size {basis.size}")
    columns = vector.reshape(basis.n_determinants, basis.n_photon_levels, -1)
    levels = min(layout.n_photon_levels, basis.n_photon_levels)
    lost = float(np.sum(np.abs(columns[:, levels:]) ** 2))
    if lost > LEAKAGE_TOL:
        raise LeakageError(lost, LEAKAGE_TOL)

    physical = physical_subspace(layout, basis.n_electrons, n_levels=levels)
    out = np.zeros((layout.dim, columns.shape[2]), dtype=complex)
    out[physical] = columns[:, :levels].reshape(-1, columns.shape[2])
    return out[:, 0] if vector.ndim == 1 else out


# =============================================================================
# DIAGNOSTICS
# =============================================================================

@dataclass
class Diagnostics:
    ensemble_error: float
    state_errors: List[float]
    infidelities: List[float]
    gap_error: Optional[float]
    energies: List[float]
    reference_energies: List[float]
    photon_numbers: List[float]
    reference_photon_numbers: List[float]
    truncation_deficits: List[float]

    @property
    def max_state_error(self) -> float:
        return max(self.state_errors)

    @property
    def max_infidelity(self) -> float:
        return max(self.infidelities)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'ensemble_error': self.ensemble_error,
            'state_errors': self.state_errors,
            'infidelities': self.infidelities,
            'gap_error': self.gap_error,
            'energies': self.energies,
            'reference_energies': self.reference_energies,
            'photon_numbers': self.photon_numbers,
            'reference_photon_numbers': self.reference_photon_numbers,
            'truncation_deficits': self.truncation_deficits,
        }


def ensemble_reference(spectrum: Spectrum, n_states: int) -> float:
    """Mean of the lowest n_states oracle energies."""
    if n_states > spectrum.k:
        raise StateCountError(f"Oracle holds {spectrum.k} states, {n_states} requested")
    return float(np.mean(spectrum.energies[:n_states]))


def diagnostics(
    result: SAVQEResult,
    spectrum: Spectrum,
    basis: HybridBasis,
    layout: RegisterLayout
) -> Diagnostics:
    """Energy errors, infidelities and gap error against the oracle."""
    n = len(result.energies)
    if spectrum.k != n:
        raise StateCountError(f"SA-VQE resolved {n} states, oracle has {spectrum.k}")

    decoded = decode_to_hybrid(result.states, layout, basis)
    amplitudes = decoded.amplitudes.reshape(basis.size, n)
    overlaps = np.sum(spectrum.vectors.conj() * amplitudes, axis=0)
    infidelities = np.clip(1.0 - np.abs(overlaps) ** 2, 0.0, 1.0)
    deficits = np.sum(np.abs(result.states) ** 2, axis=0) - np.sum(np.abs(amplitudes) ** 2, axis=0)

    number = photon_number_operator(basis)
    reference_photons = [expectation(number, spectrum.state(i)) for i in range(n)]
    gap_error = None
    if n >= 3:
        gap_error = abs(vertical_gap(result.energies) - vertical_gap(spectrum.energies))

    return Diagnostics(
        ensemble_error=abs(result.ensemble_energy - ensemble_reference(spectrum, n)),
        state_errors=np.abs(result.energies - spectrum.energies).tolist(),
        infidelities=infidelities.tolist(),
        gap_error=gap_error,
        energies=result.energies.tolist(),
        reference_energies=spectrum.energies.tolist(),
        photon_numbers=result.photon_numbers.tolist(),
        reference_photon_numbers=reference_photons,
        truncation_deficits=np.clip(deficits, 0.0, None).tolist(),
    )
