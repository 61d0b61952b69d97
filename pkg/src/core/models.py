import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from ..settings import (
    DEFAULT_SEED,
    ED_DENSE_LIMIT,
    ED_FULL_SPECTRUM_MAX_DIM,
    ED_MAX_DIM,
    HARMONIC_D_LEVELS,
    HARMONIC_OMEGA,
    SYM_TOL,
)
from .errors import ModelError, SizeGuardError
from .numerics import as_dense, max_asymmetry, sym_eig

logger = logging.getLogger(__name__)

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
SPIN_X = 0.5 * PAULI_X
SPIN_Z = 0.5 * PAULI_Z
# i * S^y: real and antisymmetric, so S^y S^y = -(SPIN_IY x SPIN_IY)
SPIN_IY = np.array([[0.0, 0.5], [-0.5, 0.0]])


class BondTerm(NamedTuple):
    left: np.ndarray
    right: np.ndarray
    coupling: float


def _parity(op):
    if max_asymmetry(op) <= SYM_TOL:
        return "symmetric"
    if float(np.max(np.abs(op + op.T))) <= SYM_TOL:
        return "antisymmetric"
    return None


@dataclass(frozen=True)
class SiteModel:
    """
    Nearest-neighbour chain Hamiltonian H = sum_i site_term_i + sum_bonds coupling * left_i right_(i+1).

    Bond operators of one term must share their parity (both symmetric or both antisymmetric)
    so every bond product is symmetric.
    """

    name: str
    d: int
    site_term: np.ndarray
    bond_terms: tuple
    reflection_symmetric: bool = True
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.d < 2:
            raise ModelError(f"Local dimension must be >= 2, got {self.d}")
        site = as_dense(self.site_term, "site_term")
        if site.shape != (self.d, self.d) or _parity(site) != "symmetric":
            raise ModelError(f"{self.name}: site_term must be a symmetric {self.d}x{self.d} matrix")
        for k, term in enumerate(self.bond_terms):
            left = as_dense(term.left, "bond left operator")
            right = as_dense(term.right, "bond right operator")
            if left.shape != (self.d, self.d) or right.shape != (self.d, self.d):
                raise ModelError(f"{self.name}: bond term {k} has wrong operator shape")
            parity = _parity(left)
            if parity is None or parity != _parity(right):
                raise ModelError(f"{self.name}: bond term {k} operators must share symmetry parity")

    def describe(self):
        return {"model": self.name, **self.params}


@dataclass(frozen=True)
class ChainSpec:
    model: SiteModel
    n_sites: int

    def __post_init__(self):
        if self.n_sites < 2:
            raise ModelError(f"A chain needs at least 2 sites, got {self.n_sites}")

    @property
    def dim(self):
        return self.model.d ** self.n_sites


# --- Model Constructors ---
def tfim(g):
    """Transverse-field Ising chain H = -sum X_i X_(i+1) - g sum Z_i."""
    return SiteModel(
        name="tfim",
        d=2,
        site_term=-g * PAULI_Z,
        bond_terms=(BondTerm(PAULI_X, PAULI_X, -1.0),),
        params={"g": float(g)},
    )


def heisenberg(jz):
    """Spin-1/2 XXZ chain H = sum (SxSx + SySy + jz SzSz) with real operators."""
    return SiteModel(
        name="heisenberg",
        d=2,
        site_term=np.zeros((2, 2)),
        bond_terms=(
            BondTerm(SPIN_X, SPIN_X, 1.0),
            BondTerm(SPIN_IY, SPIN_IY, -1.0),
            BondTerm(SPIN_Z, SPIN_Z, float(jz)),
        ),
        params={"jz": float(jz)},
    )


def oscillator_operators(d_levels, omega=HARMONIC_OMEGA):
    """
    Truncated oscillator operators in the number basis of frequency ``omega``.

    phi^2 and p^2 are built with one extra level and then cut, so they are the exact
    projections of the untruncated operators onto the kept levels.

    Returns:
        dict with keys "phi", "phi2", "p2".
    """
    size = d_levels + 1
    lower = np.diag(np.sqrt(np.arange(1, size)), k=1)
    raise_ = lower.T
    x_like = lower + raise_
    p_like = raise_ - lower  # p = i sqrt(omega/2) (a^dag - a)
    phi = x_like / np.sqrt(2.0 * omega)
    phi2 = (x_like @ x_like) / (2.0 * omega)
    p2 = -(omega / 2.0) * (p_like @ p_like)
    cut = slice(0, d_levels)
    return {"phi": phi[cut, cut], "phi2": phi2[cut, cut], "p2": p2[cut, cut]}


def harmonic_chain(mass, d_levels=HARMONIC_D_LEVELS, omega=HARMONIC_OMEGA):
    """
    Chain of coupled oscillators H = sum [p_n^2/2 + (phi_(n+1) - phi_n)^2/2 + mass^2 phi_n^2/2].

    The gradient term is split into two on-bond phi^2 halves and a -phi phi coupling,
    so open ends carry half the bulk spring.
    """
    if d_levels < 2:
        raise ModelError(f"d_levels must be >= 2, got {d_levels}")
    if mass < 0:
        raise ModelError(f"mass must be >= 0, got {mass}")
    ops = oscillator_operators(d_levels, omega)
    eye = np.eye(d_levels)
    return SiteModel(
        name="harmonic",
        d=d_levels,
        site_term=0.5 * ops["p2"] + 0.5 * mass ** 2 * ops["phi2"],
        bond_terms=(
            BondTerm(ops["phi2"], eye, 0.5),
            BondTerm(eye, ops["phi2"], 0.5),
            BondTerm(ops["phi"], ops["phi"], -1.0),
        ),
        params={"mass": float(mass), "d_levels": int(d_levels), "omega": float(omega)},
    )


MODEL_BUILDERS = {
    "tfim": lambda p: tfim(p.get("g", 1.0)),
    "heisenberg": lambda p: heisenberg(p.get("jz", 1.0)),
    "harmonic": lambda p: harmonic_chain(p.get("mass", 1.0), p.get("d_levels", HARMONIC_D_LEVELS),
                                         p.get("omega", HARMONIC_OMEGA)),
}


def model_from_name(name, **params):
    """Builds a model from its CLI name ("tfim", "heisenberg", "harmonic")."""
    try:
        builder = MODEL_BUILDERS[name]
    except KeyError:
        raise ModelError(f"Unknown model '{name}', expected one of {sorted(MODEL_BUILDERS)}") from None
    return builder(params)


# --- Exact Diagonalization ---
def _check_guard(spec):
    if spec.dim > ED_MAX_DIM:
        raise SizeGuardError(f"Hilbert space {spec.model.d}^{spec.n_sites} = {spec.dim} exceeds {ED_MAX_DIM}")


def _embed(op, site, span, spec):
    d = spec.model.d
    left = sp.identity(d ** site, format="csr")
    right = sp.identity(d ** (spec.n_sites - site - span), format="csr")
    return sp.kron(sp.kron(left, sp.csr_matrix(op)), right, format="csr")


def build_hamiltonian(spec):
    """
    Sparse open-chain Hamiltonian of ``spec``.

    Raises:
        SizeGuardError: d**N above ED_MAX_DIM.
    """
    _check_guard(spec)
    model = spec.model
    h = sp.csr_matrix((spec.dim, spec.dim))
    for i in range(spec.n_sites):
        h = h + _embed(model.site_term, i, 1, spec)
    for i in range(spec.n_sites - 1):
        for term in model.bond_terms:
            h = h + term.coupling * _embed(np.kron(term.left, term.right), i, 2, spec)
    return h.tocsr()


def _sparse_lowest(h, k, seed):
    v0 = np.random.default_rng(seed).standard_normal(h.shape[0])
    values, vectors = eigsh(h, k=k, which="SA", v0=v0)
    order = np.argsort(values)
    return values[order], vectors[:, order]


def exact_spectrum(spec, k, seed=DEFAULT_SEED):
    """
    k lowest eigenvalues of the open chain, ascending.

    Dense diagonalization up to ED_DENSE_LIMIT, sparse eigsh above. eigsh cannot return
    the last two eigenvalues, so k >= dim - 1 is dense and guarded by ED_FULL_SPECTRUM_MAX_DIM.
    """
    h = build_hamiltonian(spec)
    if not 1 <= k <= spec.dim:
        raise ModelError(f"k must lie in [1, {spec.dim}], got {k}")
    full = k >= spec.dim - 1
    if full and spec.dim > ED_FULL_SPECTRUM_MAX_DIM:
        raise SizeGuardError(f"k={k} of {spec.dim} states needs a dense diagonalization "
                             f"above {ED_FULL_SPECTRUM_MAX_DIM}")
    if spec.dim <= ED_DENSE_LIMIT or full:
        return sym_eig(h.toarray()).eigenvalues[:k]
    logger.debug("Sparse ED of %s, N=%d (dim %d)", spec.model.name, spec.n_sites, spec.dim)
    values, _ = _sparse_lowest(h, k, seed)
    return values


def exact_ground_state(spec, seed=DEFAULT_SEED):
    """Ground energy and unit ground-state vector (first significant component positive)."""
    h = build_hamiltonian(spec)
    if spec.dim <= ED_DENSE_LIMIT:
        eig = sym_eig(h.toarray())
        return float(eig.eigenvalues[0]), eig.eigenvectors[:, 0]
    values, vectors = _sparse_lowest(h, 1, seed)
    vec = vectors[:, 0] / np.linalg.norm(vectors[:, 0])
    first = np.flatnonzero(np.abs(vec) > 1e-12)[0]
    return float(values[0]), vec if vec[first] > 0 else -vec
