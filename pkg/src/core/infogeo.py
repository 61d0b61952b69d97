import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import comb

from ..settings import FD_STEP_GRADIENT, FD_STEP_HESSIAN, PROB_TOL
from .errors import ContractViolation

logger = logging.getLogger(__name__)


class ProbDist:
    """
    Discrete probability distribution.

    Args:
        p: Non-negative weights summing to 1 within ``tol``.
        tol: Normalization tolerance.
    """

    def __init__(self, p, tol=PROB_TOL):
        arr = np.asarray(p, dtype=np.float64).ravel()
        if arr.size < 1:
            raise ContractViolation("Distribution must have at least one outcome")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ContractViolation("Probabilities must be finite and non-negative")
        total = float(np.sum(arr))
        if abs(total - 1.0) > tol:
            raise ContractViolation(f"Probabilities sum to {total!r}, expected 1")
        self.p = arr

    def __len__(self):
        return self.p.size

    def __repr__(self):
        return f"ProbDist({self.p.tolist()})"


@dataclass(frozen=True)
class ParametricFamily:
    n_params: int
    evaluate: Callable  # xi -> ProbDist
    name: str = "family"


def _as_dist(p):
    return p if isinstance(p, ProbDist) else ProbDist(p)


def _pair(p, q):
    p, q = _as_dist(p), _as_dist(q)
    if len(p) != len(q):
        raise ContractViolation(f"Support length mismatch: {len(p)} vs {len(q)}")
    return p.p, q.p


def _relative_entropy(p, q):
    # sum p ln(p/q); 0 ln 0 = 0, p > 0 with q = 0 diverges
    total = 0.0
    for pi, qi in zip(p, q):
        if pi == 0.0:
            continue
        if qi == 0.0:
            return math.inf
        total += pi * math.log(pi / qi)
    return max(0.0, total)


# --- Divergences ---
def alpha_divergence(p, q, alpha):
    """
    Amari alpha-divergence D(p, q) = sum_i p_i f(q_i / p_i).

    alpha = -1 is KL(p||q), alpha = 1 is KL(q||p) and alpha = 0 the Hellinger form.
    Zero probabilities take their limits; an absolute-continuity failure returns ``math.inf``.

    Args:
        p: First distribution.
        q: Second distribution.
        alpha: Real order.

    Returns:
        Non-negative float, possibly ``math.inf``.
    """
    p, q = _pair(p, q)
    if alpha == -1:
        return _relative_entropy(p, q)
    if alpha == 1:
        return _relative_entropy(q, p)
    a = (1.0 - alpha) / 2.0
    b = (1.0 + alpha) / 2.0
    overlap = 0.0
    for pi, qi in zip(p, q):
        if pi == 0.0 and qi == 0.0:
            continue
        if pi == 0.0:
            if alpha > 1:
                return math.inf
            continue
        if qi == 0.0:
            if alpha < -1:
                return math.inf
            continue
        overlap += pi ** a * qi ** b
    return max(0.0, 4.0 / (1.0 - alpha * alpha) * (1.0 - overlap))


def hellinger_sq(p, q):
    """D0 = 2 sum (sqrt p_i - sqrt q_i)^2."""
    p, q = _pair(p, q)
    diff = np.sqrt(p) - np.sqrt(q)
    return 2.0 * float(np.sum(diff * diff))


def kl_divergence(p, q):
    """Relative entropy sum p_i ln(p_i / q_i)."""
    p, q = _pair(p, q)
    return _relative_entropy(p, q)


def shannon_entropy(p, base=math.e):
    p = _as_dist(p).p
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)) / math.log(base))


# --- Fisher Geometry ---
def _sqrt_prob(fam, xi):
    return np.sqrt(_as_dist(fam.evaluate(np.asarray(xi, dtype=np.float64))).p)


def fisher_matrix(fam, xi, h=FD_STEP_GRADIENT):
    """
    Fisher information g_ij = 4 sum_x d_i sqrt(p) d_j sqrt(p) with central differences.
    """
    if h <= 0:
        raise ContractViolation(f"Step must be positive, got {h}")
    xi = np.asarray(xi, dtype=np.float64).ravel()
    if xi.size != fam.n_params:
        raise ContractViolation(f"Expected {fam.n_params} parameters, got {xi.size}")
    grads = []
    for i in range(fam.n_params):
        step = np.zeros_like(xi)
        step[i] = h
        grads.append((_sqrt_prob(fam, xi + step) - _sqrt_prob(fam, xi - step)) / (2.0 * h))
    jac = np.array(grads)
    g = 4.0 * jac @ jac.T
    return 0.5 * (g + g.T)


def divergence_hessian(fam, xi, alpha=0.0, h=FD_STEP_HESSIAN):
    """
    Hessian in xi' of D_alpha(p(xi), p(xi')) at xi' = xi, by central differences.

    For every alpha this is the Fisher matrix.
    """
    xi = np.asarray(xi, dtype=np.float64).ravel()
    n = fam.n_params
    base = fam.evaluate(xi)

    def div(shift):
        return alpha_divergence(base, fam.evaluate(xi + shift), alpha)

    eye = np.eye(n) * h
    hess = np.zeros((n, n))
    d0 = div(np.zeros(n))
    for i in range(n):
        hess[i, i] = (div(eye[i]) - 2.0 * d0 + div(-eye[i])) / (h * h)
        for j in range(i + 1, n):
            value = (div(eye[i] + eye[j]) - div(eye[i] - eye[j])
                     - div(-eye[i] + eye[j]) + div(-eye[i] - eye[j])) / (4.0 * h * h)
            hess[i, j] = hess[j, i] = value
    return hess


# --- Named Families ---
def bernoulli_family():
    return ParametricFamily(1, lambda xi: ProbDist([1.0 - xi[0], xi[0]]), name="bernoulli")


def product_bernoulli_family(n):
    """n independent Bernoulli variables, outcomes enumerated as bit strings."""
    bits = (np.arange(2 ** n)[:, None] >> np.arange(n)[None, :]) & 1

    def evaluate(xi):
        theta = np.asarray(xi, dtype=np.float64)
        probs = np.prod(np.where(bits == 1, theta, 1.0 - theta), axis=1)
        return ProbDist(probs / probs.sum())

    return ParametricFamily(n, evaluate, name="product-bernoulli")


def binomial_family(n_trials):
    k = np.arange(n_trials + 1)
    coeffs = comb(n_trials, k)

    def evaluate(xi):
        theta = float(xi[0])
        probs = coeffs * theta ** k * (1.0 - theta) ** (n_trials - k)
        return ProbDist(probs / probs.sum())

    return ParametricFamily(1, evaluate, name="binomial")


FAMILIES = {
    "bernoulli": bernoulli_family,
    "product-bernoulli": lambda: product_bernoulli_family(2),
    "binomial": lambda: binomial_family(10),
}
