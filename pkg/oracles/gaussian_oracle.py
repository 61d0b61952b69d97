import math

import numpy as np
from numpy.polynomial.hermite import hermgauss

from src.core.errors import DomainError

GH_NODES = 200


def _ground_state_form(mass):
    # two oscillators on an open chain: K = [[m^2 + 1, -1], [-1, m^2 + 1]]
    w_minus = mass
    w_plus = math.sqrt(mass * mass + 2.0)
    diag = 0.5 * (w_minus + w_plus)
    off = 0.5 * (w_minus - w_plus)
    return diag, off


def two_oscillator_reduced_spectrum(mass, n_nodes=GH_NODES, top=10):
    """
    Reduced density matrix spectrum of one oscillator out of two coupled ones.

    The ground state is psi(x, z) ~ exp(-(a x^2 + 2 b x z + a z^2) / 2) with the closed-form
    K^(1/2) = [[a, b], [b, a]]. Both coordinates are put on a Gauss-Hermite grid, the
    weighted kernel G_ik = sqrt(w_i) psi(x_i, z_k) sqrt(w_k) is assembled in log space, and
    the eigenvalues of rho = G G^T are the squared singular values of G.

    Returns:
        The ``top`` largest eigenvalues, descending, normalized by the trace.
    """
    if not mass > 0:
        raise DomainError(f"mass must be > 0, got {mass}")
    diag, off = _ground_state_form(mass)
    nodes, weights = hermgauss(n_nodes)
    scale = 1.0 / math.sqrt(diag)
    x = scale * nodes
    with np.errstate(divide="ignore"):
        log_w = 0.5 * (np.log(weights) + nodes * nodes + math.log(scale))
    log_kernel = (log_w[:, None] + log_w[None, :]
                  - 0.5 * (diag * x[:, None] ** 2 + 2.0 * off * np.outer(x, x) + diag * x[None, :] ** 2))
    kernel = np.exp(log_kernel)
    singular = np.linalg.svd(kernel, compute_uv=False)
    values = singular ** 2
    values = values / np.sum(values)
    return np.sort(values)[::-1][:top]
