import numpy as np


def tfim_bitstring_hamiltonian(n, g):
    """
    Dense open-chain TFIM matrix built directly on bit strings.

    Basis state s = sum_i b_i 2^(n-1-i), so site 0 is the most significant bit (the same
    ordering as a left-to-right Kronecker product). Z_i = 1 - 2 b_i and X_i X_(i+1)
    flips two neighbouring bits.
    """
    dim = 2 ** n
    h = np.zeros((dim, dim))
    for state in range(dim):
        bits = [(state >> (n - 1 - i)) & 1 for i in range(n)]
        h[state, state] = -g * sum(1 - 2 * b for b in bits)
        for i in range(n - 1):
            flipped = state ^ (1 << (n - 1 - i)) ^ (1 << (n - 2 - i))
            h[flipped, state] -= 1.0
    return h
