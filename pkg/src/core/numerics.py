import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from ..settings import (
    DEFAULT_SEED,
    DEGENERACY_TOL,
    LANCZOS_BREAKDOWN,
    LANCZOS_KRYLOV_DIM,
    LANCZOS_MAX_ITER,
    LANCZOS_RESTART_KEEP,
    LANCZOS_TOL,
    PSD_TOL,
    SYM_TOL,
)
from .errors import ContractViolation, ConvergenceError, NotPSDError

logger = logging.getLogger(__name__)

# Entries below this magnitude are skipped when looking for the "first nonzero" component.
_SIGN_EPS = 1e-12


@dataclass(frozen=True)
class EigResult:
    eigenvalues: np.ndarray   # ascending
    eigenvectors: np.ndarray  # orthonormal columns, eigenvectors[:, k] <-> eigenvalues[k]


@dataclass(frozen=True)
class SvdResult:
    """
    Thin SVD of a matrix with at most as many rows as columns.

    For a tall input the decomposition is of its transpose and ``transposed`` is set;
    ``reconstruct`` always returns the original orientation.
    """

    u: np.ndarray
    singular_values: np.ndarray
    v: np.ndarray
    transposed: bool = False

    def reconstruct(self):
        core = (self.u * self.singular_values) @ self.v.T
        return core.T if self.transposed else core


# --- Validation ---
def as_dense(m, name="matrix"):
    """
    Validates and converts input to a real dense matrix.

    Args:
        m: Anything numpy can turn into a 2-D float array.
        name: Label used in error messages.

    Returns:
        A C-contiguous float64 ndarray with at least one row and one column.

    Raises:
        ContractViolation: wrong rank, empty, complex or non-finite entries.
    """
    arr = np.asarray(m)
    if np.iscomplexobj(arr):
        raise ContractViolation(f"{name} must be real")
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    if arr.ndim != 2:
        raise ContractViolation(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ContractViolation(f"{name} must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation(f"{name} has non-finite entries")
    return arr


def max_asymmetry(m):
    return float(np.max(np.abs(m - m.T))) if m.size else 0.0


def _require_symmetric(a, name):
    if a.shape[0] != a.shape[1]:
        raise ContractViolation(f"{name} must be square, got shape {a.shape}")
    asym = max_asymmetry(a)
    if asym > SYM_TOL:
        raise ContractViolation(f"{name} is not symmetric (max asymmetry {asym:.3e})")


def _sign_fix(vectors):
    # first significant component of every column made positive
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        nonzero = np.flatnonzero(np.abs(col) > _SIGN_EPS)
        if nonzero.size and col[nonzero[0]] < 0:
            out[:, k] = -col
    return out


def _order_ties(values, vectors):
    """Lexicographic column order inside each run of (numerically) equal eigenvalues."""
    n = values.size
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and values[stop] - values[stop - 1] <= DEGENERACY_TOL * max(1.0, abs(values[stop])):
            stop += 1
        if stop - start > 1:
            block = vectors[:, start:stop]
            keys = np.round(-block, 12)[::-1]
            order = np.lexsort(keys)
            vectors[:, start:stop] = block[:, order]
        start = stop
    return vectors


# --- Decompositions ---
def sym_eig(m):
    """
    Full spectrum of a real symmetric matrix, ascending, with a reproducible eigenbasis.

    Args:
        m: Square matrix, symmetric within SYM_TOL.

    Returns:
        EigResult with sign-fixed eigenvectors; degenerate columns ordered lexicographically.

    Raises:
        ContractViolation: non-square or asymmetric input.
    """
    a = as_dense(m)
    _require_symmetric(a, "sym_eig input")
    values, vectors = np.linalg.eigh(0.5 * (a + a.T))
    vectors = _order_ties(values, _sign_fix(vectors))
    return EigResult(eigenvalues=values, eigenvectors=vectors)


def svd(m):
    """
    Thin singular value decomposition psi = U D V^T with descending singular values.

    Args:
        m: Real matrix. Inputs with more rows than columns are transposed internally.

    Returns:
        SvdResult; u is square orthogonal, v has orthonormal columns.
    """
    a = as_dense(m, "svd input")
    transposed = a.shape[0] > a.shape[1]
    work = a.T if transposed else a
    u, s, vt = np.linalg.svd(work, full_matrices=False)
    v = vt.T.copy()
    for k in range(u.shape[1]):
        col = u[:, k]
        nonzero = np.flatnonzero(np.abs(col) > _SIGN_EPS)
        if nonzero.size and col[nonzero[0]] < 0:
            u[:, k] = -col
            v[:, k] = -v[:, k]
    return SvdResult(u=u, singular_values=s, v=v, transposed=transposed)


def psd_sqrt(rho):
    """
    Symmetric square root of a positive semidefinite matrix.

    Args:
        rho: A DensityMatrix (anything with ``.mat``) or a plain symmetric matrix.

    Returns:
        The PSD matrix R with R @ R == rho.

    Raises:
        NotPSDError: an eigenvalue lies below -PSD_TOL.
    """
    mat = getattr(rho, "mat", rho)
    eig = sym_eig(mat)
    values = eig.eigenvalues
    if values[0] < -PSD_TOL:
        raise NotPSDError(float(values[0]))
    roots = np.sqrt(np.clip(values, 0.0, None))
    root = (eig.eigenvectors * roots) @ eig.eigenvectors.T
    return 0.5 * (root + root.T)


# --- Lanczos ---
def _deflate(vec, locked):
    if locked is not None:
        vec -= locked @ (locked.T @ vec)
        vec -= locked @ (locked.T @ vec)
    return vec


def _orthogonalize(vec, basis, locked):
    vec = vec - basis @ (basis.T @ vec)
    vec = vec - basis @ (basis.T @ vec)
    return _deflate(vec, locked)


def lanczos_ground(apply, dim, tol=LANCZOS_TOL, max_iter=LANCZOS_MAX_ITER, seed=DEFAULT_SEED,
                   locked=None, krylov_dim=LANCZOS_KRYLOV_DIM, keep=LANCZOS_RESTART_KEEP):
    """
    Lowest eigenpair of a symmetric operator given only its action on vectors.

    Thick-restart Lanczos with full reorthogonalization: every ``krylov_dim`` steps the
    Krylov space is collapsed onto its ``keep`` lowest Ritz vectors plus the residual
    direction, so nearly degenerate partners of the ground state are carried across
    restarts. Ritz pairs come from the projected matrix V^T H V. The start vector is drawn
    from ``numpy.random.default_rng(seed)``.

    Args:
        apply: Callback v -> H v on 1-D arrays of length ``dim``.
        dim: Vector space dimension.
        tol: Residual target, ||Hv - Ev|| <= tol * max(1, |E|).
        max_iter: Maximum number of operator applications.
        seed: Start-vector seed.
        locked: Optional dim x k matrix of orthonormal vectors the search is kept orthogonal to.
        krylov_dim: Krylov space size per restart cycle.
        keep: Ritz vectors retained at a restart.

    Returns:
        (energy, vector) with a unit-norm, sign-fixed vector.

    Raises:
        ConvergenceError: residual target not met within ``max_iter`` applications.
        ContractViolation: the operator produced NaN or infinite entries.
    """
    if dim < 1:
        raise ContractViolation(f"Lanczos dimension must be >= 1, got {dim}")
    if tol <= 0:
        raise ContractViolation(f"Lanczos tolerance must be positive, got {tol}")
    if locked is not None:
        locked = np.asarray(locked, dtype=np.float64).reshape(dim, -1)
        if locked.shape[1] >= dim:
            raise ContractViolation("No room left for Lanczos after locking")
    free_dim = dim - (0 if locked is None else locked.shape[1])
    size = max(2, min(krylov_dim, free_dim))
    keep = max(1, min(keep, size - 1))

    rng = np.random.default_rng(seed)
    v = _deflate(rng.standard_normal(dim), locked)
    v /= np.linalg.norm(v)

    basis = np.zeros((dim, size))
    proj = np.zeros((size, size))
    images = np.zeros((dim, size))
    n_kept = 0
    n_applied = 0
    best_residual = np.inf
    restart = 0
    while n_applied < max_iter:
        n = n_kept
        while True:
            basis[:, n] = v
            images[:, n] = np.asarray(apply(v), dtype=np.float64)
            if not np.all(np.isfinite(images[:, n])):
                raise ContractViolation("Operator returned non-finite entries")
            n += 1
            n_applied += 1
            proj[:n, n - 1] = basis[:, :n].T @ images[:, n - 1]
            proj[n - 1, :n] = proj[:n, n - 1]
            theta, s = eigh(proj[:n, :n])
            ritz = basis[:, :n] @ s[:, 0]
            h_ritz = images[:, :n] @ s[:, 0]
            energy = float(theta[0])
            residual_vec = _deflate(h_ritz - energy * ritz, locked)
            residual = float(np.linalg.norm(residual_vec))
            best_residual = min(best_residual, residual)
            if residual <= tol * max(1.0, abs(energy)):
                logger.debug("Lanczos converged: E=%.12f residual=%.3e (%d applications, %d restarts)",
                             energy, residual, n_applied, restart)
                ritz = _deflate(ritz, locked)
                return energy, _sign_fix((ritz / np.linalg.norm(ritz))[:, None])[:, 0]
            if n >= size or n >= free_dim or n_applied >= max_iter:
                break
            w = _orthogonalize(images[:, n - 1].copy(), basis[:, :n], locked)
            beta = float(np.linalg.norm(w))
            if beta <= LANCZOS_BREAKDOWN * max(1.0, float(np.linalg.norm(images[:, n - 1]))):
                break
            v = w / beta

        logger.debug("Lanczos cycle %d: E=%.12f residual=%.3e (%d applications)",
                     restart, energy, residual, n_applied)
        n_kept = min(keep, n)
        basis[:, :n_kept] = basis[:, :n] @ s[:, :n_kept]
        images[:, :n_kept] = images[:, :n] @ s[:, :n_kept]
        proj[:n_kept, :n_kept] = np.diag(theta[:n_kept])
        v = _orthogonalize(residual_vec, basis[:, :n_kept], locked)
        norm = float(np.linalg.norm(v))
        if norm <= LANCZOS_BREAKDOWN:
            break
        v /= norm
        restart += 1

    raise ConvergenceError(best_residual)


def lanczos_lowest(apply, dim, n_states, tol=LANCZOS_TOL, max_iter=LANCZOS_MAX_ITER, seed=DEFAULT_SEED):
    """
    Lowest ``n_states`` eigenpairs by repeated Lanczos, locking converged vectors.

    Returns:
        (energies ascending, dim x n_states matrix of orthonormal eigenvectors)
    """
    if not 1 <= n_states <= dim:
        raise ContractViolation(f"n_states must lie in [1, {dim}], got {n_states}")
    energies, vectors = [], []
    for k in range(n_states):
        locked = np.column_stack(vectors) if vectors else None
        energy, vec = lanczos_ground(apply, dim, tol=tol, max_iter=max_iter, seed=seed + k, locked=locked)
        energies.append(energy)
        vectors.append(vec)
    order = np.argsort(energies, kind="stable")
    return np.asarray(energies)[order], np.column_stack(vectors)[:, order]
