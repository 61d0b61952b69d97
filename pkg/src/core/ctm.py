import logging
import math
from dataclasses import dataclass

import numpy as np

from ..settings import CTM_DEFAULTS, CTM_MAX_INTERIOR_SPINS
from .errors import ContractViolation, DomainError, SizeGuardError
from .qinfo import DensityMatrix, von_neumann_entropy

logger = logging.getLogger(__name__)

BOUNDARIES = ("free", "fixed")


@dataclass(frozen=True)
class CtmConfig:
    """
    Square (2L+1) x (2L+1) Ising lattice with the origin at its centre.

    Args:
        half_width: L, spins per semiaxis excluding the origin.
        beta_j: Dimensionless coupling K = beta J.
        boundary: "free" rim spins, or "fixed" to +1 on every rim site (|x| = L or |y| = L).
    """

    half_width: int = CTM_DEFAULTS["L"]
    beta_j: float = CTM_DEFAULTS["beta_j"]
    boundary: str = CTM_DEFAULTS["boundary"]

    def __post_init__(self):
        if self.half_width < 1:
            raise SizeGuardError(f"L must be >= 1, got {self.half_width}")
        if self.half_width ** 2 > CTM_MAX_INTERIOR_SPINS:
            raise SizeGuardError(
                f"L={self.half_width} puts {self.half_width ** 2} spins in a quadrant interior "
                f"(limit {CTM_MAX_INTERIOR_SPINS})"
            )
        if not math.isfinite(self.beta_j):
            raise DomainError(f"beta_j must be finite, got {self.beta_j}")
        if self.boundary not in BOUNDARIES:
            raise ContractViolation(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")

    @property
    def total_spins(self):
        return (2 * self.half_width + 1) ** 2


@dataclass(frozen=True)
class QuadrantMatrix:
    """
    Corner transfer matrix A[sigma_R, sigma_U] of one quadrant.

    Both indices are semiaxis configurations that include the origin spin:
    index = origin_bit * 2^L + sum_j bit_j 2^j, where bit_j is the spin at distance j + 1
    from the origin and bit 0 means spin +1. A vanishes unless both origin bits agree.
    """

    mat: np.ndarray
    config: CtmConfig

    @staticmethod
    def index(origin_bit, axis_bits, half_width):
        return origin_bit * 2 ** half_width + axis_bits


def _spin_table(n_bits):
    idx = np.arange(2 ** n_bits)
    return 1 - 2 * ((idx[:, None] >> np.arange(n_bits)[None, :]) & 1)


def _interior_sum(cfg):
    """Sum over the L x L interior, row by row, for every pair of bounding semiaxes."""
    size, k = cfg.half_width, cfg.beta_j
    fixed = cfg.boundary == "fixed"
    axis = _spin_table(size)   # [config, distance - 1]
    rows = axis                # [config, column - 1], same encoding
    horizontal = np.sum(rows[:, :-1] * rows[:, 1:], axis=1)
    transfer = np.exp(k * (rows @ rows.T))
    edge_free = (rows[:, -1] == 1) if fixed else np.ones(rows.shape[0], dtype=bool)
    all_up = np.all(rows == 1, axis=1)

    weights = None
    for y in range(1, size + 1):
        mask = all_up if (fixed and y == size) else edge_free
        # bonds inside the row and from its first spin to the vertical semiaxis site (0, y)
        local = np.exp(k * (horizontal[None, :] + np.outer(axis[:, y - 1], rows[:, 0]))) * mask[None, :]
        if weights is None:
            below = np.exp(k * (axis @ rows.T))  # row y = 1 sits on the horizontal semiaxis
            weights = below[:, None, :] * local[None, :, :]
        else:
            weights = (weights @ transfer) * local[None, :, :]
    return weights.sum(axis=2)


def build_quadrant(cfg):
    """
    Corner transfer matrix of the first quadrant.

    Interior bonds and interior-to-axis bonds carry the full coupling; bonds along a
    semiaxis (origin bond included) are shared with the neighbouring quadrant and carry K/2,
    so the four quadrants count every bond once and A is symmetric.
    """
    size, k = cfg.half_width, cfg.beta_j
    axis = _spin_table(size)
    interior = _interior_sum(cfg)
    chain = np.sum(axis[:, :-1] * axis[:, 1:], axis=1)
    axis_ok = (axis[:, -1] == 1) if cfg.boundary == "fixed" else np.ones(axis.shape[0], dtype=bool)
    dim = 2 ** size
    mat = np.zeros((2 * dim, 2 * dim))
    for origin_bit, origin in ((0, 1), (1, -1)):
        half = np.exp(0.5 * k * (origin * axis[:, 0] + chain)) * axis_ok
        block = slice(origin_bit * dim, (origin_bit + 1) * dim)
        mat[block, block] = half[:, None] * interior * half[None, :]
    return QuadrantMatrix(mat=mat, config=cfg)


def _scaled_fourth_power(a):
    scale = float(np.max(np.abs(a)))
    unit = a / scale
    square = unit @ unit
    return scale, square @ square


def partition_function(cfg):
    """Z = Tr(A^4) for the isotropic lattice (A = B = C = D)."""
    scale, power = _scaled_fourth_power(build_quadrant(cfg).mat)
    z = scale ** 4 * float(np.trace(power))
    if not math.isfinite(z):
        raise DomainError(f"Partition function overflows at beta_j={cfg.beta_j}")
    logger.debug("Z(L=%d, K=%g, %s) = %.12e", cfg.half_width, cfg.beta_j, cfg.boundary, z)
    return z


def half_row_density(cfg):
    """rho_R = A^4 / Tr(A^4) on the semiaxis configurations."""
    _, power = _scaled_fourth_power(build_quadrant(cfg).mat)
    power = 0.5 * (power + power.T)
    return DensityMatrix(power / np.trace(power))


def ctm_entropy(cfg):
    return von_neumann_entropy(half_row_density(cfg))
