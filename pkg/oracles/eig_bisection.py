import numpy as np

MAX_BISECTIONS = 200


def _count_below(a, sigma):
    """Number of eigenvalues of a below sigma: negative pivots of an LDL^T of a - sigma I."""
    n = a.shape[0]
    shifted = a - sigma * np.eye(n)
    lower = np.eye(n)
    pivots = np.zeros(n)
    tiny = 1e-300
    for j in range(n):
        pivots[j] = shifted[j, j] - np.sum(lower[j, :j] ** 2 * pivots[:j])
        if pivots[j] == 0.0:
            pivots[j] = -tiny
        for i in range(j + 1, n):
            lower[i, j] = (shifted[i, j] - np.sum(lower[i, :j] * lower[j, :j] * pivots[:j])) / pivots[j]
    return int(np.sum(pivots < 0))


def charpoly_eigenvalues(m, tol=1e-13):
    """
    Spectrum of a real symmetric matrix by bisection on the characteristic polynomial.

    Sylvester's law of inertia turns the pivot signs of LDL^T(A - sigma I) into the number
    of roots below sigma; each eigenvalue is bracketed inside the Gershgorin interval.
    Uses no eigensolver.
    """
    a = np.asarray(m, dtype=np.float64)
    n = a.shape[0]
    radius = np.sum(np.abs(a), axis=1) - np.abs(np.diag(a))
    low = float(np.min(np.diag(a) - radius)) - 1.0
    high = float(np.max(np.diag(a) + radius)) + 1.0
    scale = max(1.0, abs(low), abs(high))
    values = []
    for k in range(n):
        lo, hi = low, high
        for _ in range(MAX_BISECTIONS):
            mid = 0.5 * (lo + hi)
            if _count_below(a, mid) > k:
                hi = mid
            else:
                lo = mid
            if hi - lo <= tol * scale:
                break
        values.append(0.5 * (lo + hi))
    return np.array(values)
