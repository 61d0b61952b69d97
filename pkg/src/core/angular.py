import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from ..settings import (
    ENTROPY_EPS,
    MASS_FLOOR,
    NU_UNENTANGLED,
    QUAD_ABS_FACTOR,
    QUAD_DECAY,
    QUAD_LIMIT,
    QUAD_TOL,
)
from .errors import ContractViolation, DomainError, ModelError
from .numerics import psd_sqrt, sym_eig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GaussianChain:
    n: int
    mass: float
    coupling_matrix: np.ndarray


@dataclass(frozen=True)
class EntanglementSpectrum:
    single_particle_energies: np.ndarray  # ascending
    rho_eigenvalues: np.ndarray           # descending
    entropy: float

    def to_dict(self, limit=None):
        rho = self.rho_eigenvalues if limit is None else self.rho_eigenvalues[:limit]
        return {
            "epsilons": [float(e) for e in self.single_particle_energies],
            "rho_eigenvalues": [float(v) for v in rho],
            "entropy": float(self.entropy),
        }


@dataclass(frozen=True)
class WaveSample:
    x: float
    value: float


# --- Gaussian Half-Chain ---
def coupling_matrix(n, mass):
    """
    Open harmonic chain with free ends: K = (mass^2 + 2) on the bulk diagonal,
    mass^2 + 1 on the two end sites, -1 between neighbours. mass = 0 is replaced
    by MASS_FLOOR.
    """
    if n < 2:
        raise ModelError(f"Chain needs at least 2 sites, got {n}")
    if mass < 0:
        raise ModelError(f"mass must be >= 0, got {mass}")
    m2 = max(mass, MASS_FLOOR) ** 2
    k = np.diag(np.full(n, m2 + 2.0)) - np.eye(n, k=1) - np.eye(n, k=-1)
    k[0, 0] = k[-1, -1] = m2 + 1.0
    return GaussianChain(n=n, mass=float(mass), coupling_matrix=k)


def _thermal_entropy(eps):
    x = np.exp(-eps)
    return float(np.sum(eps * x / (1.0 - x) - np.log1p(-x)))


def _enumerate_levels(eps, cutoff):
    """Occupation-number eigenvalues prod (1 - e^-eps_k) e^(-n_k eps_k) with sum n_k <= cutoff."""
    if eps.size == 0:
        return np.array([1.0])
    norm = float(np.sum(np.log1p(-np.exp(-eps))))
    # each occupation vector is reached once: quanta are only added at modes >= the last one
    stack = [(0.0, 0, 0)]  # (energy, quanta, lowest mode allowed)
    energies = []
    while stack:
        energy, quanta, pos = stack.pop()
        energies.append(energy)
        if quanta >= cutoff:
            continue
        for k in range(pos, eps.size):
            stack.append((energy + eps[k], quanta + 1, k))
    values = np.exp(norm - np.array(energies))
    return np.sort(values)[::-1]


def spectrum_entropy(eigenvalues):
    lam = np.asarray(eigenvalues, dtype=np.float64)
    lam = lam[lam > ENTROPY_EPS]
    return float(-np.sum(lam * np.log(lam)))


def half_chain_spectrum(g, cut, n_modes=8, cutoff=12):
    """
    Exact entanglement spectrum of the first ``cut`` sites of the harmonic-chain ground state.

    Correlators X = K^(-1/2) / 2 and P = K^(1/2) / 2 are restricted to the kept sites; the
    symplectic eigenvalues nu of X_A P_A give single-particle energies
    eps = ln[(nu + 1/2) / (nu - 1/2)]. The reduced density matrix is a product of thermal
    modes, so its eigenvalues are enumerated from occupation numbers of the ``n_modes``
    softest modes up to ``cutoff`` total quanta. The entropy uses the closed form over all modes.

    Args:
        g: GaussianChain.
        cut: Number of sites kept (1 <= cut < n).
        n_modes: Modes entering the eigenvalue enumeration (<= cut).
        cutoff: Maximum total number of quanta.

    Returns:
        EntanglementSpectrum

    Raises:
        ModelError: K is not positive definite.
    """
    if not 1 <= cut < g.n:
        raise ContractViolation(f"cut must lie in [1, {g.n - 1}], got {cut}")
    if not 1 <= n_modes <= cut:
        raise ContractViolation(f"n_modes must lie in [1, {cut}], got {n_modes}")
    if cutoff < 0:
        raise ContractViolation(f"cutoff must be >= 0, got {cutoff}")
    eig = sym_eig(g.coupling_matrix)
    if eig.eigenvalues[0] <= 0:
        raise ModelError(f"Coupling matrix is not positive definite (min eigenvalue {eig.eigenvalues[0]:.3e})")
    vecs = eig.eigenvectors
    root = np.sqrt(eig.eigenvalues)
    x_full = 0.5 * (vecs / root) @ vecs.T
    p_full = 0.5 * (vecs * root) @ vecs.T
    x_a = x_full[:cut, :cut]
    p_a = p_full[:cut, :cut]
    x_half = psd_sqrt(0.5 * (x_a + x_a.T))
    inner = x_half @ p_a @ x_half
    nu_sq = np.linalg.eigvalsh(0.5 * (inner + inner.T))
    nu = np.sqrt(np.clip(nu_sq, 0.25, None))
    entangled = nu - 0.5 >= NU_UNENTANGLED
    nu = np.sort(nu[entangled])[::-1]
    eps = np.log((nu + 0.5) / (nu - 0.5))
    entropy = _thermal_entropy(eps) if eps.size else 0.0
    rho = _enumerate_levels(eps[: min(n_modes, eps.size)], cutoff)
    logger.debug("Half-chain spectrum n=%d cut=%d: %d entangled modes, S=%.8f", g.n, cut, eps.size, entropy)
    return EntanglementSpectrum(single_particle_energies=eps, rho_eigenvalues=rho, entropy=entropy)


def epsilon_spacing(spectrum):
    """Successive differences of the single-particle energies (diagnostic only)."""
    return np.diff(spectrum.single_particle_energies)


# --- Imaginary-Order Bessel Wave ---
def bessel_k_imag(ell, x, tol=QUAD_TOL):
    """
    K_{i ell}(x) = integral_0^inf exp(-x cosh t) cos(ell t) dt for real ell >= 0, x > 0.

    The integrand is rescaled by exp(x) and integrated with a cosine weight up to the
    point where x (cosh t - 1) exceeds QUAD_DECAY + ln(1/tol).

    Raises:
        DomainError: x <= 0 or ell < 0.
    """
    if not x > 0:
        raise DomainError(f"bessel_k_imag needs x > 0, got {x}")
    if ell < 0:
        raise DomainError(f"bessel_k_imag needs ell >= 0, got {ell}")
    t_max = math.acosh(1.0 + (QUAD_DECAY + math.log(1.0 / tol)) / x)

    def envelope(t):
        return math.exp(-x * (math.cosh(t) - 1.0))

    options = {"epsabs": tol * QUAD_ABS_FACTOR, "epsrel": tol, "limit": QUAD_LIMIT}
    if ell > 0:
        options.update(weight="cos", wvar=ell)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        value, _ = quad(envelope, 0.0, t_max, **options)
    for warn in caught:
        logger.warning("Quadrature for K_i%g(%g) did not reach tolerance: %s", ell, x, warn.message)
    return math.exp(-x) * value


def wave_samples(ell, mass, x_min, x_max, n_samples):
    """Log-spaced samples of K_{i ell}(mass x) on [x_min, x_max]."""
    if not 0 < x_min < x_max:
        raise DomainError(f"Need 0 < x_min < x_max, got {x_min}, {x_max}")
    if mass <= 0:
        raise DomainError(f"mass must be > 0, got {mass}")
    if n_samples < 2:
        raise DomainError(f"Need at least 2 samples, got {n_samples}")
    xs = np.geomspace(x_min, x_max, n_samples)
    return [WaveSample(x=float(x), value=bessel_k_imag(ell, mass * x)) for x in xs]


def zero_crossings(samples):
    """Linearly interpolated positions of sign changes in a sampled wave."""
    crossings = []
    for a, b in zip(samples, samples[1:]):
        if a.value == 0.0:
            crossings.append(a.x)
        elif a.value * b.value < 0:
            crossings.append(a.x - a.value * (b.x - a.x) / (b.value - a.value))
    return crossings


def bessel_ode_residual(ell, x, h=1e-2, tol=1e-13):
    """
    x^2 K'' + x K' + (ell^2 - x^2) K for K = K_{i ell}, derivatives by five-point stencils.
    """
    if not x - 2 * h > 0:
        raise DomainError(f"Stencil leaves the domain at x={x}, h={h}")
    f = [bessel_k_imag(ell, x + k * h, tol=tol) for k in (-2, -1, 0, 1, 2)]
    d1 = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
    d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
    return x * x * d2 + x * d1 + (ell * ell - x * x) * f[2]
