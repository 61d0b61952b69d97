import logging
from dataclasses import dataclass, field

import numpy as np

from ..settings import DEFAULT_SEED, DEGENERACY_TOL, LANCZOS_MAX_ITER, LANCZOS_TOL, ORTHO_TOL, TRACE_TOL
from .errors import ContractViolation, ConvergenceError, ModelError
from .numerics import as_dense, lanczos_lowest
from .qinfo import DensityMatrix, bures_distance, entropy_from_eigenvalues, fidelity

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TruncationReport:
    kept_eigenvalues: np.ndarray  # descending
    discarded_weight: float
    entanglement_entropy: float   # nats, of the full block density matrix
    m_kept: int

    def to_dict(self, limit=None):
        values = self.kept_eigenvalues if limit is None else self.kept_eigenvalues[:limit]
        return {
            "eigenvalues": [float(v) for v in values],
            "discarded_weight": float(self.discarded_weight),
            "entropy": float(self.entanglement_entropy),
            "m_kept": int(self.m_kept),
        }


@dataclass(frozen=True)
class Block:
    """
    Renormalized block of ``n_sites`` physical sites in an ``m``-state basis.

    ``edge_ops[k]`` holds the (left, right) operators of bond term k acting on the site
    next to the origin, projected through every truncation so far.
    """

    m: int
    n_sites: int
    h_block: np.ndarray
    edge_ops: tuple
    basis_log: tuple = ()


@dataclass(frozen=True)
class SuperblockState:
    psi: np.ndarray  # block index x mirrored-block index
    energy: float

    def __post_init__(self):
        norm = float(np.linalg.norm(self.psi))
        if abs(norm - 1.0) > TRACE_TOL:
            raise ContractViolation(f"Superblock state is not normalized (norm {norm!r})")


@dataclass(frozen=True)
class TargetEnsemble:
    weights: tuple
    states: tuple

    def __post_init__(self):
        if len(self.weights) != len(self.states) or not self.states:
            raise ContractViolation("Ensemble needs one weight per state and at least one state")
        if any(w <= 0 for w in self.weights):
            raise ContractViolation("Ensemble weights must be positive")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ContractViolation(f"Ensemble weights sum to {sum(self.weights)!r}, expected 1")
        if len({s.psi.shape for s in self.states}) != 1:
            raise ContractViolation("Ensemble states must share their shape")


@dataclass
class DmrgResult:
    iterations: int
    energy_trace: list
    energy_per_site_trace: list
    final_spectrum: TruncationReport
    converged: bool
    m_max: int
    entropy_trace: list = field(default_factory=list)
    discarded_trace: list = field(default_factory=list)
    reports: list = field(default_factory=list)
    superblock_sites: list = field(default_factory=list)

    @property
    def energy_per_site(self):
        return self.energy_per_site_trace[-1] if self.energy_per_site_trace else None


# --- Block Operations ---
def _match_parity(op, reference):
    # projected operators keep the symmetry of the bare site operator
    if np.allclose(reference, reference.T):
        return 0.5 * (op + op.T)
    return 0.5 * (op - op.T)


def initial_block(model):
    """The soluble one-site block."""
    return Block(
        m=model.d,
        n_sites=1,
        h_block=np.array(model.site_term, dtype=np.float64),
        edge_ops=tuple((np.array(t.left, dtype=np.float64), np.array(t.right, dtype=np.float64))
                       for t in model.bond_terms),
    )


def enlarge_block(b, model):
    """
    Adds one site next to the origin.

    h' = h (x) 1 + 1 (x) site_term + sum_k c_k left_k(edge) (x) right_k(new site)
    """
    eye_m = np.eye(b.m)
    eye_d = np.eye(model.d)
    h = np.kron(b.h_block, eye_d) + np.kron(eye_m, model.site_term)
    for (left, _), term in zip(b.edge_ops, model.bond_terms):
        h += term.coupling * np.kron(left, term.right)
    edge_ops = tuple((np.kron(eye_m, t.left), np.kron(eye_m, t.right)) for t in model.bond_terms)
    return Block(
        m=b.m * model.d,
        n_sites=b.n_sites + 1,
        h_block=0.5 * (h + h.T),
        edge_ops=edge_ops,
        basis_log=b.basis_log,
    )


def rotate_block(b, projector, report=None):
    """Projects the block Hamiltonian and edge operators onto the kept states."""
    p = as_dense(projector, "projector")
    if p.shape[0] != b.m:
        raise ContractViolation(f"Projector has {p.shape[0]} rows, block dimension is {b.m}")
    h = p.T @ b.h_block @ p
    edge_ops = tuple(
        (_match_parity(p.T @ left @ p, left), _match_parity(p.T @ right @ p, right))
        for left, right in b.edge_ops
    )
    log = b.basis_log + ((report,) if report is not None else ())
    return Block(m=p.shape[1], n_sites=b.n_sites, h_block=0.5 * (h + h.T), edge_ops=edge_ops, basis_log=log)


# --- Superblock ---
def _superblock_apply(b, model):
    h = b.h_block
    pairs = [(term.coupling, left, right.T) for (left, right), term in zip(b.edge_ops, model.bond_terms)]
    m = b.m

    def apply(vec):
        psi = vec.reshape(m, m)
        out = h @ psi + psi @ h
        for coupling, left, right_t in pairs:
            out += coupling * (left @ psi @ right_t)
        return out.ravel()

    return apply


def superblock_states(b, model, n_states=1, tol=LANCZOS_TOL, seed=DEFAULT_SEED, max_iter=LANCZOS_MAX_ITER):
    """
    Lowest ``n_states`` states of block + mirrored block, applied matrix-free.

    H_super psi = h psi + psi h + sum_k c_k L_k psi R_k^T
    """
    if not model.reflection_symmetric:
        raise ModelError(f"Model '{model.name}' is not reflection symmetric")
    energies, vectors = lanczos_lowest(_superblock_apply(b, model), b.m * b.m, n_states,
                                       tol=tol, max_iter=max_iter, seed=seed)
    return [SuperblockState(psi=vectors[:, k].reshape(b.m, b.m), energy=float(energies[k]))
            for k in range(n_states)]


def superblock_ground(b, model, tol=LANCZOS_TOL, seed=DEFAULT_SEED):
    return superblock_states(b, model, 1, tol=tol, seed=seed)[0]


# --- Density Matrices And Truncation ---
def block_density_matrix(s):
    """rho = psi psi^T / Tr(psi psi^T) over the block index."""
    return DensityMatrix.from_state(s.psi)


def mixed_density_matrix(e):
    """rho = sum_k w_k psi_k psi_k^T, unit trace."""
    rho = sum(w * (s.psi @ s.psi.T) for w, s in zip(e.weights, e.states))
    rho = 0.5 * (rho + rho.T)
    return DensityMatrix(rho / np.trace(rho))


def truncate(rho, m_max):
    """
    Keeps the ``m_max`` largest density-matrix eigenvectors.

    A multiplet straddling the cut is kept whole when its eigenvalue is above
    DEGENERACY_TOL, even if that exceeds ``m_max``.

    Returns:
        (projector l x m, TruncationReport)
    """
    if m_max < 1:
        raise ContractViolation(f"m_max must be >= 1, got {m_max}")
    values = rho.eig.eigenvalues[::-1]
    vectors = rho.eig.eigenvectors[:, ::-1]
    size = values.size
    m = min(m_max, size)
    if values[m - 1] > DEGENERACY_TOL:
        while m < size and values[m - 1] - values[m] <= DEGENERACY_TOL:
            m += 1
    if m > m_max:
        logger.warning("Kept %d states (m_max=%d) to complete a degenerate multiplet", m, m_max)
    kept = np.clip(values[:m], 0.0, 1.0)
    discarded = float(np.sum(np.clip(values[m:], 0.0, None)))
    report = TruncationReport(
        kept_eigenvalues=kept,
        discarded_weight=discarded,
        entanglement_entropy=entropy_from_eigenvalues(values),
        m_kept=m,
    )
    return np.ascontiguousarray(vectors[:, :m]), report


def _projected(psi, projector):
    p = as_dense(projector, "projector")
    err = float(np.max(np.abs(p.T @ p - np.eye(p.shape[1]))))
    if err > ORTHO_TOL:
        raise ContractViolation(f"Projector columns are not orthonormal (max deviation {err:.3e})")
    return p @ (p.T @ psi)


def truncation_distance(s, projector):
    """||psi - P P^T psi||_F^2, the squared distance to the kept block subspace."""
    psi = getattr(s, "psi", s)
    diff = psi - _projected(psi, projector)
    return float(np.sum(diff * diff))


def truncation_fidelity(s, projector):
    """
    Fidelity and Bures distance between the block density matrix and its renormalized
    counterpart (block density of the normalized projected state).

    Returns:
        (fidelity, bures_distance)
    """
    psi = getattr(s, "psi", s)
    projected = _projected(psi, projector)
    norm = float(np.linalg.norm(projected))
    if norm == 0.0:
        return 0.0, 4.0
    rho = DensityMatrix.from_state(psi)
    rho_t = DensityMatrix.from_state(projected / norm)
    return fidelity(rho, rho_t), bures_distance(rho, rho_t)


# --- Driver ---
def run_infinite_dmrg(model, m_max, max_iters, energy_tol, seed=DEFAULT_SEED, n_targets=1,
                      weights=None, lanczos_tol=LANCZOS_TOL):
    """
    Infinite-system DMRG on a mirrored block geometry.

    Each iteration: reflect the block, solve the superblock, build the block density
    matrix, truncate to ``m_max`` and add one site next to the origin. Convergence is
    declared on the energy per site [E(2n+2) - E(2n)] / 2.

    Args:
        model: Reflection symmetric SiteModel.
        m_max: Retained block states.
        max_iters: Maximum number of iterations.
        energy_tol: Convergence threshold on successive energies per site.
        seed: Base seed for the Lanczos start vectors.
        n_targets: Number of lowest superblock states entering the density matrix.
        weights: Ensemble weights for ``n_targets`` > 1 (uniform by default).
        lanczos_tol: Residual target for the superblock eigensolver.

    Returns:
        DmrgResult
    """
    if not model.reflection_symmetric:
        raise ModelError(f"Model '{model.name}' is not reflection symmetric")
    if m_max < 1 or max_iters < 1 or energy_tol <= 0:
        raise ContractViolation("m_max and max_iters must be >= 1 and energy_tol > 0")
    if not 1 <= n_targets <= model.d ** 2:
        raise ContractViolation(f"n_targets must lie in [1, {model.d ** 2}], got {n_targets}")
    if weights is None:
        weights = (1.0 / n_targets,) * n_targets
    weights = tuple(float(w) for w in weights)
    if len(weights) != n_targets:
        raise ContractViolation(f"Expected {n_targets} weights, got {len(weights)}")

    logger.info("Starting infinite DMRG: model=%s m_max=%d max_iters=%d targets=%d",
                model.name, m_max, max_iters, n_targets)
    result = DmrgResult(iterations=0, energy_trace=[], energy_per_site_trace=[],
                        final_spectrum=None, converged=False, m_max=m_max)
    block = initial_block(model)
    for iteration in range(1, max_iters + 1):
        try:
            states = superblock_states(block, model, n_targets, tol=lanczos_tol, seed=seed + iteration)
        except ConvergenceError as exc:
            logger.error("Lanczos failed at iteration %d", iteration)
            raise ConvergenceError(exc.best_residual, iteration=iteration) from exc

        if n_targets == 1:
            rho = block_density_matrix(states[0])
        else:
            rho = mixed_density_matrix(TargetEnsemble(weights=weights, states=tuple(states)))
        projector, report = truncate(rho, m_max)

        energy = states[0].energy
        result.iterations = iteration
        result.energy_trace.append(energy)
        result.superblock_sites.append(2 * block.n_sites)
        result.reports.append(report)
        result.entropy_trace.append(report.entanglement_entropy)
        result.discarded_trace.append(report.discarded_weight)
        result.final_spectrum = report
        if len(result.energy_trace) >= 2:
            result.energy_per_site_trace.append(0.5 * (result.energy_trace[-1] - result.energy_trace[-2]))
        logger.debug("Iteration %d: sites=%d E=%.12f m=%d discarded=%.3e S=%.6f",
                     iteration, 2 * block.n_sites, energy, report.m_kept,
                     report.discarded_weight, report.entanglement_entropy)

        trace = result.energy_per_site_trace
        if len(trace) >= 2 and abs(trace[-1] - trace[-2]) < energy_tol:
            result.converged = True
            break
        block = enlarge_block(rotate_block(block, projector, report), model)

    if result.converged:
        logger.info("DMRG converged after %d iterations: energy per site %.10f",
                    result.iterations, result.energy_per_site)
    else:
        logger.warning("DMRG did not converge in %d iterations", result.iterations)
    return result
