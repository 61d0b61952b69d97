import os

import numpy as np
import pytest

from src.core.qinfo import DensityMatrix
from src.settings import DEFAULT_SEED


def pytest_addoption(parser):
    parser.addoption("--emit-oracle", action="store", default=None, metavar="DIR",
                     help="Write every OracleReport produced by the tests as JSON into DIR")


@pytest.fixture
def rng():
    return np.random.default_rng(DEFAULT_SEED)


@pytest.fixture
def random_state(rng):
    """Factory for normalized coefficient matrices psi_ij."""

    def make(rows, cols):
        psi = rng.standard_normal((rows, cols))
        return psi / np.linalg.norm(psi)

    return make


@pytest.fixture
def random_density(rng):
    """Factory for full-rank random density matrices."""

    def make(dim):
        g = rng.standard_normal((dim, dim))
        rho = g @ g.T
        rho = 0.5 * (rho + rho.T)
        return DensityMatrix(rho / np.trace(rho))

    return make


@pytest.fixture
def random_orthogonal(rng):
    def make(dim):
        q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
        return q * np.sign(np.diag(r))

    return make


@pytest.fixture
def oracle_sink(request):
    """Callable that writes an OracleReport to --emit-oracle DIR when the option is set."""
    directory = request.config.getoption("--emit-oracle")

    def emit(report):
        if directory is None:
            return
        os.makedirs(directory, exist_ok=True)
        name = f"{request.node.name}.json".replace("/", "_")
        with open(os.path.join(directory, name), "w") as handle:
            handle.write(report.to_json())

    return emit
