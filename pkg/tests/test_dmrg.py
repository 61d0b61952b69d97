import dataclasses
import math

import numpy as np
import pytest

from oracles import tfim_energy_density_exact
from src.core import dmrg
from src.core.dmrg import (
    SuperblockState,
    TargetEnsemble,
    block_density_matrix,
    enlarge_block,
    initial_block,
    mixed_density_matrix,
    rotate_block,
    run_infinite_dmrg,
    superblock_ground,
    superblock_states,
    truncate,
    truncation_distance,
    truncation_fidelity,
)
from src.core.errors import ContractViolation, ConvergenceError, ModelError
from src.core.models import ChainSpec, build_hamiltonian, exact_spectrum, harmonic_chain, heisenberg, tfim
from src.core.numerics import max_asymmetry
from src.core.qinfo import DensityMatrix, partial_densities


def _state(psi):
    psi = np.asarray(psi, dtype=np.float64)
    return SuperblockState(psi=psi / np.linalg.norm(psi), energy=0.0)


def _random_projector(random_orthogonal, dim, m):
    return random_orthogonal(dim)[:, :m]


# --- Blocks ---
def test_enlarged_initial_block_is_two_site_chain():
    model = tfim(1.0)
    block = enlarge_block(initial_block(model), model)
    expected = build_hamiltonian(ChainSpec(model, 2)).toarray()
    assert block.m == 4 and block.n_sites == 2
    assert np.allclose(block.h_block, expected, atol=1e-14)


@pytest.mark.parametrize("model", [tfim(0.4), heisenberg(1.0), harmonic_chain(1.0, 4)])
def test_enlarged_block_is_symmetric(model):
    block = enlarge_block(enlarge_block(initial_block(model), model), model)
    assert max_asymmetry(block.h_block) <= 1e-12


def test_enlarged_harmonic_block_is_variational():
    model = harmonic_chain(1.0, 4)
    block = enlarge_block(initial_block(model), model)
    assert np.linalg.eigvalsh(block.h_block)[0] >= 0.5 * (1.0 + math.sqrt(3.0)) - 1e-12


def test_rotation_keeps_edge_operator_parity(random_orthogonal):
    model = heisenberg(1.0)
    block = enlarge_block(initial_block(model), model)
    rotated = rotate_block(block, _random_projector(random_orthogonal, 4, 3))
    assert rotated.m == 3
    left_y, right_y = rotated.edge_ops[1]
    assert np.allclose(left_y, -left_y.T) and np.allclose(right_y, -right_y.T)
    assert max_asymmetry(rotated.h_block) <= 1e-12


def test_rotation_rejects_wrong_projector():
    model = tfim(1.0)
    with pytest.raises(ContractViolation):
        rotate_block(initial_block(model), np.eye(3))


# --- Superblock ---
def test_superblock_of_single_sites():
    state = superblock_ground(initial_block(tfim(1.0)), tfim(1.0))
    assert state.energy == pytest.approx(-math.sqrt(5.0), abs=1e-9)
    assert np.linalg.norm(state.psi) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("model", [tfim(1.0), heisenberg(1.0), heisenberg(0.0)])
def test_superblock_of_two_site_blocks(model):
    block = enlarge_block(initial_block(model), model)
    state = superblock_ground(block, model)
    assert state.energy == pytest.approx(exact_spectrum(ChainSpec(model, 4), 1)[0], abs=1e-8)


def test_superblock_excited_states():
    model = tfim(1.0)
    states = superblock_states(initial_block(model), model, n_states=4)
    root5 = math.sqrt(5.0)
    assert np.allclose([s.energy for s in states], [-root5, -1.0, 1.0, root5], atol=1e-9)


def test_superblock_needs_reflection_symmetry():
    model = dataclasses.replace(tfim(1.0), reflection_symmetric=False)
    with pytest.raises(ModelError):
        superblock_ground(initial_block(model), model)


def test_superblock_state_must_be_normalized():
    with pytest.raises(ContractViolation):
        SuperblockState(psi=np.ones((2, 2)), energy=0.0)


# --- Density matrices and truncation ---
def test_block_density_of_bell_state():
    rho = block_density_matrix(_state(np.eye(2)))
    assert np.allclose(rho.mat, np.eye(2) / 2, atol=1e-14)


def test_block_density_of_product_state():
    rho = block_density_matrix(_state([[1.0, 0.0], [0.0, 0.0]]))
    assert np.allclose(rho.spectrum(), [1.0, 0.0], atol=1e-14)


def test_block_density_spectrum_is_schmidt_squared(random_state):
    psi = random_state(4, 4)
    rho = block_density_matrix(_state(psi))
    s = np.linalg.svd(psi, compute_uv=False)
    assert np.allclose(rho.spectrum(), s ** 2, atol=1e-12)


def test_truncating_maximally_mixed_keeps_multiplet():
    projector, report = truncate(DensityMatrix(np.eye(2) / 2), 1)
    assert report.m_kept == 2
    assert projector.shape == (2, 2)
    assert report.discarded_weight == pytest.approx(0.0, abs=1e-14)


def test_truncation_report_values():
    projector, report = truncate(DensityMatrix(np.diag([0.9, 0.1])), 1)
    assert report.m_kept == 1
    assert report.discarded_weight == pytest.approx(0.1, abs=1e-12)
    assert report.entanglement_entropy == pytest.approx(0.3250829733914482, abs=1e-7)
    assert np.allclose(np.abs(projector[:, 0]), [1.0, 0.0])


def test_full_truncation_is_lossless(random_density):
    rho = random_density(5)
    projector, report = truncate(rho, 5)
    assert report.discarded_weight == pytest.approx(0.0, abs=1e-14)
    assert np.allclose(projector.T @ projector, np.eye(5), atol=1e-12)
    assert np.all(np.diff(report.kept_eigenvalues) <= 0)


def test_truncation_rejects_zero_states():
    with pytest.raises(ContractViolation):
        truncate(DensityMatrix(np.eye(2) / 2), 0)


def test_truncation_distance_examples(random_state):
    assert truncation_distance(_state(np.eye(3)), np.eye(3)) == pytest.approx(0.0, abs=1e-14)
    assert truncation_distance(_state(np.eye(2)), np.eye(2)[:, :1]) == pytest.approx(0.5, abs=1e-14)
    state = _state(random_state(6, 6))
    projector, report = truncate(block_density_matrix(state), 3)
    assert truncation_distance(state, projector) == pytest.approx(report.discarded_weight, abs=1e-10)


def test_truncation_distance_rejects_non_orthonormal_projector():
    with pytest.raises(ContractViolation):
        truncation_distance(_state(np.eye(2)), np.array([[1.0], [1.0]]))


def test_density_matrix_projector_is_optimal(random_state, random_orthogonal):
    for _ in range(3):
        state = _state(random_state(6, 6))
        projector, _ = truncate(block_density_matrix(state), 3)
        best = truncation_distance(state, projector)
        for _ in range(200):
            other = _random_projector(random_orthogonal, 6, 3)
            assert best <= truncation_distance(state, other) + 1e-12


def test_mixed_density_of_single_state(random_state):
    state = _state(random_state(3, 3))
    mixed = mixed_density_matrix(TargetEnsemble(weights=(1.0,), states=(state,)))
    assert np.allclose(mixed.mat, block_density_matrix(state).mat, atol=1e-14)


def test_mixed_density_of_orthogonal_states():
    states = (_state([[1.0, 0.0], [0.0, 0.0]]), _state([[0.0, 0.0], [0.0, 1.0]]))
    mixed = mixed_density_matrix(TargetEnsemble(weights=(0.5, 0.5), states=states))
    assert np.allclose(mixed.spectrum(), [0.5, 0.5], atol=1e-14)


def test_mixed_density_projector_minimizes_weighted_error(random_state, random_orthogonal):
    states = tuple(_state(random_state(5, 5)) for _ in range(3))
    weights = (0.5, 0.3, 0.2)
    projector, _ = truncate(mixed_density_matrix(TargetEnsemble(weights=weights, states=states)), 2)

    def cost(p):
        return sum(w * truncation_distance(s, p) for w, s in zip(weights, states))

    best = cost(projector)
    for _ in range(200):
        assert best <= cost(_random_projector(random_orthogonal, 5, 2)) + 1e-12


def test_ensemble_validation():
    state = _state(np.eye(2))
    with pytest.raises(ContractViolation):
        TargetEnsemble(weights=(0.6, 0.6), states=(state, state))
    with pytest.raises(ContractViolation):
        TargetEnsemble(weights=(1.0,), states=(state, state))


def test_truncation_fidelity_of_density_matrix_projector(random_state):
    state = _state(random_state(6, 6))
    projector, report = truncate(block_density_matrix(state), 3)
    fid, bures = truncation_fidelity(state, projector)
    dw = report.discarded_weight
    assert fid == pytest.approx(1.0 - dw, abs=1e-10)
    assert bures == pytest.approx(4.0 * (1.0 - math.sqrt(1.0 - dw)), abs=1e-10)


def test_truncation_fidelity_bounds(random_state, random_orthogonal):
    state = _state(random_state(5, 5))
    for _ in range(20):
        projector = _random_projector(random_orthogonal, 5, 3)
        fid, bures = truncation_fidelity(state, projector)
        kept = projector @ (projector.T @ state.psi)
        kept /= np.linalg.norm(kept)
        overlap = float(np.sum(state.psi * kept))
        assert fid >= overlap ** 2 - 1e-10
        assert bures <= 2.0 * float(np.sum((state.psi - kept) ** 2)) + 1e-10


# --- Driver ---
@pytest.mark.parametrize("model", [tfim(0.5), tfim(1.0), tfim(2.0), heisenberg(1.0)])
def test_untruncated_dmrg_reproduces_exact_diagonalization(model):
    result = run_infinite_dmrg(model, m_max=64, max_iters=6, energy_tol=1e-14)
    assert result.superblock_sites == [2, 4, 6, 8, 10, 12]
    for sites, energy in zip(result.superblock_sites, result.energy_trace):
        assert energy == pytest.approx(exact_spectrum(ChainSpec(model, sites), 1)[0], abs=1e-8)
    assert all(dw == pytest.approx(0.0, abs=1e-12) for dw in result.discarded_trace)


def test_gapped_tfim_converges_quickly():
    result = run_infinite_dmrg(tfim(0.2), m_max=8, max_iters=20, energy_tol=1e-6)
    assert result.converged
    assert result.energy_per_site == pytest.approx(tfim_energy_density_exact(0.2), abs=1e-6)


def test_critical_tfim_energy_density():
    result = run_infinite_dmrg(tfim(1.0), m_max=12, max_iters=30, energy_tol=1e-10)
    assert result.energy_per_site == pytest.approx(-4.0 / math.pi, abs=5e-3)


def test_critical_energy_density_decreases():
    result = run_infinite_dmrg(tfim(1.0), m_max=16, max_iters=20, energy_tol=1e-14)
    trace = result.energy_per_site_trace
    assert all(b <= a + 1e-6 for a, b in zip(trace[1:], trace[2:]))


def test_superblock_halves_have_equal_spectra():
    model = tfim(1.0)
    block = enlarge_block(enlarge_block(initial_block(model), model), model)
    state = superblock_ground(block, model)
    rho_l, rho_r = partial_densities(state.psi)
    assert np.allclose(rho_l.spectrum(), rho_r.spectrum(), atol=1e-10)


def test_harmonic_truncation_spectrum_is_sorted():
    result = run_infinite_dmrg(harmonic_chain(1.0, 8), m_max=16, max_iters=4, energy_tol=1e-12)
    values = result.final_spectrum.kept_eigenvalues
    assert np.all(np.diff(values) <= 0)
    assert np.all(values >= 0)
    assert len(result.reports) == result.iterations


def test_multi_target_run():
    result = run_infinite_dmrg(tfim(1.0), m_max=8, max_iters=5, energy_tol=1e-12, n_targets=2)
    assert result.energy_trace[0] == pytest.approx(-math.sqrt(5.0), abs=1e-9)
    assert all(math.isfinite(e) for e in result.energy_trace)


def test_driver_rejects_bad_arguments():
    with pytest.raises(ContractViolation):
        run_infinite_dmrg(tfim(1.0), m_max=0, max_iters=5, energy_tol=1e-8)
    with pytest.raises(ContractViolation):
        run_infinite_dmrg(tfim(1.0), m_max=4, max_iters=5, energy_tol=1e-8, n_targets=2, weights=(1.0,))
    with pytest.raises(ModelError):
        run_infinite_dmrg(dataclasses.replace(tfim(1.0), reflection_symmetric=False), 4, 5, 1e-8)


def test_lanczos_failure_reports_iteration(monkeypatch):
    def failing(*args, **kwargs):
        raise ConvergenceError(1e-3)

    monkeypatch.setattr(dmrg, "superblock_states", failing)
    with pytest.raises(ConvergenceError) as info:
        run_infinite_dmrg(tfim(1.0), m_max=4, max_iters=5, energy_tol=1e-8)
    assert info.value.iteration == 1
    assert info.value.best_residual == pytest.approx(1e-3)
