import math

from scipy.integrate import quad

from src.core.errors import DomainError


def tfim_energy_density_exact(g, tol=1e-12):
    """
    Ground-state energy per site of H = -sum X X - g sum Z in the thermodynamic limit.

    e(g) = -(1 / 2 pi) integral_0^{2 pi} sqrt(1 + g^2 + 2 g cos k) dk, folded onto [0, pi].
    Equals -1 at g = 0 and -4/pi at g = 1.
    """
    if g < 0:
        raise DomainError(f"g must be >= 0, got {g}")
    value, _ = quad(lambda k: math.sqrt(1.0 + g * g + 2.0 * g * math.cos(k)), 0.0, math.pi,
                    epsabs=tol, epsrel=tol, limit=500)
    return -value / math.pi
