"""End-to-end runs at the sizes used for the published results. Run with ``pytest -m slow``."""
import math

import numpy as np
import pytest

from oracles import OracleReport, tfim_energy_density_exact
from src.core.angular import coupling_matrix, half_chain_spectrum
from src.core.dmrg import run_infinite_dmrg
from src.core.models import harmonic_chain, tfim

pytestmark = pytest.mark.slow


def test_critical_tfim_reaches_free_fermion_energy(oracle_sink):
    result = run_infinite_dmrg(tfim(1.0), m_max=20, max_iters=60, energy_tol=1e-8)
    exact = tfim_energy_density_exact(1.0)
    assert result.energy_per_site == pytest.approx(exact, abs=1e-3)
    oracle_sink(OracleReport("tfim-energy", {"g": 1.0}, exact, 1e-12))


@pytest.mark.parametrize("g", [0.5, 1.5])
def test_off_critical_tfim(g):
    result = run_infinite_dmrg(tfim(g), m_max=16, max_iters=40, energy_tol=1e-9)
    assert result.converged
    assert result.energy_per_site == pytest.approx(tfim_energy_density_exact(g), abs=1e-6)


def _dmrg_and_gaussian_spectra(d_levels, m_max, iters, top):
    result = run_infinite_dmrg(harmonic_chain(1.0, d_levels), m_max=m_max, max_iters=iters, energy_tol=1e-14)
    sites = result.superblock_sites[-1]
    dmrg = result.reports[-1].kept_eigenvalues[:top]
    exact = half_chain_spectrum(coupling_matrix(sites, 1.0), sites // 2, n_modes=min(8, sites // 2)).rho_eigenvalues
    return dmrg, exact[:top]


def test_harmonic_truncation_spectrum_matches_gaussian_chain():
    dmrg, exact = _dmrg_and_gaussian_spectra(d_levels=8, m_max=16, iters=6, top=3)
    assert np.allclose(dmrg, exact, rtol=0.05)


def _log_linear_fit(values):
    ranks = np.arange(values.size)
    logs = np.log(values)
    slope, intercept = np.polyfit(ranks, logs, 1)
    residual = np.sum((logs - (slope * ranks + intercept)) ** 2)
    total = np.sum((logs - np.mean(logs)) ** 2)
    return slope, intercept, 1.0 - residual / total


def test_harmonic_truncation_spectrum_full_size():
    dmrg, exact = _dmrg_and_gaussian_spectra(d_levels=10, m_max=32, iters=10, top=8)
    assert np.allclose(dmrg, exact, rtol=0.05)
    for spectrum in (dmrg, exact):
        slope, intercept, r_squared = _log_linear_fit(np.asarray(spectrum))
        assert r_squared >= 0.98
        assert slope < 0 and math.isfinite(intercept)

