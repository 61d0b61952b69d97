import math

import numpy as np
import pytest

from oracles import charpoly_eigenvalues
from src.core.errors import ContractViolation, ConvergenceError, NotPSDError
from src.core.models import ChainSpec, build_hamiltonian, tfim
from src.core.numerics import lanczos_ground, lanczos_lowest, psd_sqrt, svd, sym_eig
from src.core.qinfo import DensityMatrix


def _random_symmetric(rng, n):
    a = rng.standard_normal((n, n))
    return 0.5 * (a + a.T)


# --- sym_eig ---
def test_sym_eig_pauli_x():
    res = sym_eig([[0.0, 1.0], [1.0, 0.0]])
    assert np.allclose(res.eigenvalues, [-1.0, 1.0], atol=1e-14)


def test_sym_eig_identity():
    res = sym_eig(np.eye(3))
    assert np.allclose(res.eigenvalues, [1.0, 1.0, 1.0], atol=1e-14)
    assert np.allclose(res.eigenvectors.T @ res.eigenvectors, np.eye(3), atol=1e-12)


def test_sym_eig_matches_bisection_oracle(rng):
    for _ in range(5):
        m = _random_symmetric(rng, 6)
        assert np.allclose(sym_eig(m).eigenvalues, charpoly_eigenvalues(m), atol=1e-9)


@pytest.mark.parametrize("n", [1, 2, 5, 17])
def test_sym_eig_invariants(rng, n):
    m = _random_symmetric(rng, n)
    res = sym_eig(m)
    v, lam = res.eigenvectors, res.eigenvalues
    assert np.all(np.diff(lam) >= 0)
    assert np.max(np.abs(m @ v - v * lam)) <= 1e-10 * max(1.0, np.max(np.abs(m)))
    assert np.allclose(v.T @ v, np.eye(n), atol=1e-10)
    for k in range(n):
        first = np.flatnonzero(np.abs(v[:, k]) > 1e-12)[0]
        assert v[first, k] > 0


def test_sym_eig_is_deterministic(rng):
    m = _random_symmetric(rng, 8)
    a, b = sym_eig(m), sym_eig(m.copy())
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)


def test_sym_eig_rejects_asymmetric():
    with pytest.raises(ContractViolation):
        sym_eig([[0.0, 1.0], [0.0, 0.0]])


def test_sym_eig_rejects_non_square_and_nan():
    with pytest.raises(ContractViolation):
        sym_eig(np.ones((2, 3)))
    with pytest.raises(ContractViolation):
        sym_eig([[np.nan, 0.0], [0.0, 1.0]])


# --- svd ---
def test_svd_diagonal():
    res = svd([[3.0, 0.0], [0.0, 1.0]])
    assert np.allclose(res.singular_values, [3.0, 1.0], atol=1e-14)


def test_svd_bell_state():
    res = svd(np.eye(2) / math.sqrt(2.0))
    assert np.allclose(res.singular_values, [1 / math.sqrt(2.0)] * 2, atol=1e-14)


def test_svd_matches_eigenvalues_of_gram(random_state):
    psi = random_state(4, 8)
    res = svd(psi)
    gram = sym_eig(psi @ psi.T).eigenvalues[::-1]
    assert np.allclose(res.singular_values ** 2, gram, atol=1e-12)
    assert abs(np.sum(res.singular_values ** 2) - 1.0) <= 1e-12


def test_svd_invariants_wide(rng):
    m = rng.standard_normal((3, 7))
    res = svd(m)
    assert not res.transposed
    assert np.all(np.diff(res.singular_values) <= 0)
    assert np.allclose(res.u.T @ res.u, np.eye(3), atol=1e-12)
    assert np.allclose(res.v.T @ res.v, np.eye(3), atol=1e-12)
    assert np.max(np.abs(res.reconstruct() - m)) <= 1e-12 * np.max(np.abs(m)) * 7


def test_svd_tall_input_is_transposed(rng):
    m = rng.standard_normal((9, 4))
    res = svd(m)
    assert res.transposed
    assert res.reconstruct().shape == (9, 4)
    assert np.allclose(res.reconstruct(), m, atol=1e-12)


def test_svd_rejects_nan():
    with pytest.raises(ContractViolation):
        svd([[1.0, np.inf]])


# --- psd_sqrt ---
def test_psd_sqrt_of_half_identity():
    assert np.allclose(psd_sqrt(np.eye(2) / 2), np.eye(2) / math.sqrt(2.0), atol=1e-14)


def test_psd_sqrt_rank_deficient():
    assert np.allclose(psd_sqrt(np.diag([1.0, 0.0])), np.diag([1.0, 0.0]), atol=1e-14)


def test_psd_sqrt_reconstructs(random_density):
    rho = random_density(4)
    root = psd_sqrt(rho)
    assert np.allclose(root, root.T, atol=1e-14)
    assert np.allclose(root @ root, rho.mat, atol=1e-9)


def test_psd_sqrt_accepts_density_matrix():
    rho = DensityMatrix(np.diag([0.75, 0.25]))
    assert np.allclose(psd_sqrt(rho), np.diag([math.sqrt(0.75), 0.5]), atol=1e-14)


def test_psd_sqrt_clamps_roundoff_negatives():
    root = psd_sqrt(np.diag([1.0, -1e-13]))
    assert np.allclose(root, np.diag([1.0, 0.0]), atol=1e-14)


def test_psd_sqrt_rejects_negative_eigenvalue():
    with pytest.raises(NotPSDError) as info:
        psd_sqrt(np.diag([1.0, -1e-6]))
    assert info.value.min_eigenvalue == pytest.approx(-1e-6)


# --- Lanczos ---
def test_lanczos_diagonal():
    diag = np.arange(1.0, 11.0)
    energy, vec = lanczos_ground(lambda v: diag * v, 10)
    assert abs(energy - 1.0) <= 1e-10
    assert np.allclose(vec, np.eye(10)[0], atol=1e-8)


def test_lanczos_two_by_two():
    m = np.array([[1.0, 2.0], [2.0, -1.0]])
    energy, _ = lanczos_ground(lambda v: m @ v, 2)
    assert abs(energy + math.sqrt(5.0)) <= 1e-10 * math.sqrt(5.0)


def test_lanczos_tfim_chain():
    h = build_hamiltonian(ChainSpec(tfim(1.0), 8))
    energy, vec = lanczos_ground(lambda v: h @ v, h.shape[0])
    exact = sym_eig(h.toarray()).eigenvalues[0]
    assert abs(energy - exact) <= 1e-9
    assert abs(np.linalg.norm(vec) - 1.0) <= 1e-12


@pytest.mark.parametrize("n", [3, 20, 64, 256])
def test_lanczos_random_symmetric(rng, n):
    m = _random_symmetric(rng, n)
    energy, vec = lanczos_ground(lambda v: m @ v, n, tol=1e-10)
    exact = sym_eig(m).eigenvalues[0]
    assert abs(energy - exact) <= 10 * 1e-10 * max(1.0, abs(exact))
    assert np.linalg.norm(m @ vec - energy * vec) <= 1e-10 * max(1.0, abs(energy))


def test_lanczos_is_deterministic(rng):
    m = _random_symmetric(rng, 40)
    a = lanczos_ground(lambda v: m @ v, 40, seed=7)
    b = lanczos_ground(lambda v: m @ v, 40, seed=7)
    assert a[0] == b[0]
    assert np.array_equal(a[1], b[1])


def test_lanczos_raises_when_budget_is_exhausted(rng):
    m = _random_symmetric(rng, 200)
    with pytest.raises(ConvergenceError) as info:
        lanczos_ground(lambda v: m @ v, 200, max_iter=3)
    assert info.value.best_residual > 0
    assert info.value.iteration is None


def test_lanczos_rejects_non_finite_operator():
    m = np.diag(np.arange(1.0, 6.0))
    m[2, 3] = m[3, 2] = np.nan
    with pytest.raises(ContractViolation):
        lanczos_ground(lambda v: m @ v, 5)


def test_lanczos_lowest_states():
    diag = np.arange(1.0, 11.0)
    energies, vectors = lanczos_lowest(lambda v: diag * v, 10, 3)
    assert np.allclose(energies, [1.0, 2.0, 3.0], atol=1e-9)
    assert np.allclose(vectors.T @ vectors, np.eye(3), atol=1e-9)


def test_lanczos_lowest_degenerate_pair():
    diag = np.array([1.0, 1.0, 2.0])
    energies, vectors = lanczos_lowest(lambda v: diag * v, 3, 3)
    assert np.allclose(energies, [1.0, 1.0, 2.0], atol=1e-9)
    assert np.allclose(vectors.T @ vectors, np.eye(3), atol=1e-9)


def test_lanczos_rejects_bad_arguments():
    with pytest.raises(ContractViolation):
        lanczos_ground(lambda v: v, 0)
    with pytest.raises(ContractViolation):
        lanczos_ground(lambda v: v, 4, tol=0.0)
    with pytest.raises(ContractViolation):
        lanczos_lowest(lambda v: v, 4, 5)
