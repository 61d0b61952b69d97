import logging
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy.linalg import polar

from ..settings import ENTROPY_EPS, ORTHO_TOL, PSD_TOL, SYM_TOL, TRACE_TOL
from .errors import ContractViolation, NotPSDError
from .numerics import as_dense, max_asymmetry, psd_sqrt, svd, sym_eig

logger = logging.getLogger(__name__)


class DensityMatrix:
    """
    Symmetric positive semidefinite unit-trace matrix.

    The eigendecomposition is computed once, on first use, and cached.

    Args:
        mat: Square real matrix, symmetric within SYM_TOL with trace 1 within TRACE_TOL.
        check_psd: Verify the smallest eigenvalue is above -PSD_TOL at construction.
    """

    def __init__(self, mat, check_psd=True):
        mat = as_dense(mat, "density matrix")
        if mat.shape[0] != mat.shape[1]:
            raise ContractViolation(f"Density matrix must be square, got {mat.shape}")
        asym = max_asymmetry(mat)
        if asym > SYM_TOL:
            raise ContractViolation(f"Density matrix is not symmetric (max asymmetry {asym:.3e})")
        trace = float(np.trace(mat))
        if abs(trace - 1.0) > TRACE_TOL:
            raise ContractViolation(f"Density matrix trace is {trace!r}, expected 1")
        self.mat = 0.5 * (mat + mat.T)
        if check_psd and self.eig.eigenvalues[0] < -PSD_TOL:
            raise NotPSDError(float(self.eig.eigenvalues[0]))

    @classmethod
    def from_state(cls, psi):
        """Reduced density matrix psi psi^T / Tr of the row index of a coefficient matrix."""
        psi = as_dense(psi, "state")
        rho = psi @ psi.T
        rho = 0.5 * (rho + rho.T)
        return cls(rho / np.trace(rho))

    @property
    def dim(self):
        return self.mat.shape[0]

    @cached_property
    def eig(self):
        return sym_eig(self.mat)

    def spectrum(self):
        """Eigenvalues, descending."""
        return self.eig.eigenvalues[::-1].copy()

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


@dataclass(frozen=True)
class SchmidtDecomposition:
    coefficients: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    def reconstruct(self):
        return (self.left_vectors * self.coefficients) @ self.right_vectors.T


class EntropyExperiment(NamedTuple):
    before: tuple
    after: tuple


def _require_normalized(psi):
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > TRACE_TOL:
        raise ContractViolation(f"State is not normalized (Frobenius norm {norm!r})")


def _require_same_dim(r1, r2):
    if r1.dim != r2.dim:
        raise ContractViolation(f"Dimension mismatch: {r1.dim} vs {r2.dim}")


def _require_orthogonal(u, name="u"):
    u = as_dense(u, name)
    if u.shape[0] != u.shape[1]:
        raise ContractViolation(f"{name} must be square, got {u.shape}")
    err = float(np.max(np.abs(u.T @ u - np.eye(u.shape[0]))))
    if err > ORTHO_TOL:
        raise ContractViolation(f"{name} is not orthogonal (max deviation {err:.3e})")
    return u


# --- Bipartite States ---
def partial_densities(psi):
    """
    Left and right reduced density matrices of a pure bipartite state.

    Args:
        psi: Coefficient matrix psi_ij, Frobenius norm 1.

    Returns:
        (rho_L, rho_R) = (psi psi^T, psi^T psi), each renormalized to unit trace.
    """
    psi = as_dense(psi, "state")
    _require_normalized(psi)
    return DensityMatrix.from_state(psi), DensityMatrix.from_state(psi.T)


def entropy_from_eigenvalues(values):
    """-sum lambda ln lambda over eigenvalues above ENTROPY_EPS."""
    lam = np.asarray(values, dtype=np.float64)
    lam = lam[lam > ENTROPY_EPS]
    return max(0.0, float(-np.sum(lam * np.log(lam))))


def von_neumann_entropy(rho):
    return entropy_from_eigenvalues(rho.spectrum())


def schmidt(psi):
    """Schmidt decomposition psi = sum_i lambda_i u_i v_i^T, coefficients descending."""
    psi = as_dense(psi, "state")
    _require_normalized(psi)
    res = svd(psi)
    if res.transposed:
        return SchmidtDecomposition(res.singular_values, res.v, res.u)
    return SchmidtDecomposition(res.singular_values, res.u, res.v)


def ensemble_density(states, weights):
    """Mixed state sum_k w_k |psi_k><psi_k| on the full space, unit trace."""
    vecs = [np.ravel(as_dense(np.atleast_2d(s), "state")) for s in states]
    if len(vecs) != len(weights):
        raise ContractViolation("One weight per state required")
    rho = sum(w * np.outer(v, v) for w, v in zip(weights, vecs))
    return DensityMatrix(rho / np.trace(rho))


# --- Distances ---
def fidelity(r1, r2):
    """
    Uhlmann fidelity F = [Tr sqrt(sqrt(rho1) rho2 sqrt(rho1))]^2, clamped to [0, 1].
    """
    _require_same_dim(r1, r2)
    root = psd_sqrt(r1)
    inner = root @ r2.mat @ root
    inner = 0.5 * (inner + inner.T)
    values = np.linalg.eigvalsh(inner)
    trace_norm = float(np.sum(np.sqrt(np.clip(values, 0.0, None))))
    return min(1.0, max(0.0, trace_norm ** 2))


def bures_distance(r1, r2):
    """Bures distance D = 4 (1 - sqrt F), in [0, 4]."""
    return min(4.0, max(0.0, 4.0 * (1.0 - np.sqrt(fidelity(r1, r2)))))


def purification_distance(r1, r2, o):
    """
    2 ||W1 - W2 O||_F^2 for the square-root factorizations W = sqrt(rho).

    The infimum over orthogonal O is the Bures distance.
    """
    _require_same_dim(r1, r2)
    o = _require_orthogonal(o, "o")
    diff = psd_sqrt(r1) - psd_sqrt(r2) @ o
    return 2.0 * float(np.sum(diff * diff))


def optimal_purification_rotation(r1, r2):
    """Orthogonal O attaining the infimum of purification_distance (polar factor of W2 W1)."""
    _require_same_dim(r1, r2)
    rotation, _ = polar(psd_sqrt(r2) @ psd_sqrt(r1))
    return rotation


# --- Subsystems ---
def partial_trace(rho, dims, trace_out="B"):
    """
    Partial trace of a density matrix on A (x) B.

    Args:
        rho: DensityMatrix of dimension dims[0] * dims[1].
        dims: (dim_A, dim_B).
        trace_out: "A" or "B", the factor summed over.
    """
    dim_a, dim_b = dims
    if dim_a * dim_b != rho.dim:
        raise ContractViolation(f"Dimension {rho.dim} does not factor as {dim_a} x {dim_b}")
    tensor = rho.mat.reshape(dim_a, dim_b, dim_a, dim_b)
    if trace_out == "B":
        reduced = np.einsum("ijkj->ik", tensor)
    elif trace_out == "A":
        reduced = np.einsum("ijil->jl", tensor)
    else:
        raise ContractViolation(f"trace_out must be 'A' or 'B', got {trace_out!r}")
    return DensityMatrix(reduced / np.trace(reduced), check_psd=False)


def interaction_entropy_experiment(r1, r2, u):
    """
    Entropies of two subsystems before and after a joint orthogonal evolution.

    Starts from rho_L (x) rho_R, evolves with u, and traces back down. Subadditivity
    forces S'_L + S'_R >= S_L + S_R.

    Returns:
        EntropyExperiment(before=(S_L, S_R), after=(S'_L, S'_R))
    """
    u = _require_orthogonal(u)
    if u.shape[0] != r1.dim * r2.dim:
        raise ContractViolation(f"u has dimension {u.shape[0]}, expected {r1.dim * r2.dim}")
    joint = np.kron(r1.mat, r2.mat)
    evolved = u @ joint @ u.T
    evolved = DensityMatrix(0.5 * (evolved + evolved.T), check_psd=False)
    left = partial_trace(evolved, (r1.dim, r2.dim), trace_out="B")
    right = partial_trace(evolved, (r1.dim, r2.dim), trace_out="A")
    before = (von_neumann_entropy(r1), von_neumann_entropy(r2))
    after = (von_neumann_entropy(left), von_neumann_entropy(right))
    logger.debug("Interaction experiment: before=%s after=%s", before, after)
    return EntropyExperiment(before=before, after=after)
