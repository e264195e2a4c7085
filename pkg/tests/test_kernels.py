import os
import subprocess
import sys

import numpy as np
import pytest

from ecsbell import kernels

py = kernels.get_backend("python")
needs_compiled = pytest.mark.skipif("compiled" not in kernels.available_backends(),
                                    reason="compiled kernels not built")


@pytest.fixture(scope="module")
def cy():
    return kernels.get_backend("compiled")


@needs_compiled
@pytest.mark.parametrize("dim,alpha", [(1, 0.5), (20, 0.0), (40, 1.3 - 0.4j), (120, 5.0j)])
def test_displacement_backends_agree(cy, dim, alpha):
    a, b = cy.displacement_matrix(dim, alpha), py.displacement_matrix(dim, alpha)
    assert a.shape == (dim, dim)
    assert np.abs(a - b).max() < 1e-13


@needs_compiled
def test_bw_backends_agree(cy):
    rng = np.random.default_rng(0)
    for _ in range(50):
        p = np.ascontiguousarray(rng.uniform(-2, 2, 8))
        a1, a2 = rng.uniform(0, 2, 2)
        theta = rng.uniform(0, 6)
        assert cy.bw_signal(p, a1, a2, theta) == pytest.approx(py.bw_signal(p, a1, a2, theta), abs=1e-13)
        b1, b2 = complex(*p[:2]), complex(*p[2:4])
        assert cy.bw_correlation(b1, b2, a1, a2, theta) == pytest.approx(
            py.bw_correlation(b1, b2, a1, a2, theta), abs=1e-13)


@needs_compiled
def test_rk4_backends_agree(cy):
    rng = np.random.default_rng(1)
    g0 = rng.normal(size=6) + 1j * rng.normal(size=6)
    e0 = rng.normal(size=6) + 1j * rng.normal(size=6)
    ts = np.linspace(0.0, 3.0, 7)
    a = cy.rk4_dispersive(g0, e0, 1.0, 0.2, 0.45, ts, 0.01)
    b = py.rk4_dispersive(g0, e0, 1.0, 0.2, 0.45, ts, 0.01)
    assert a[0].shape == (7, 6)
    assert np.abs(a[0] - b[0]).max() < 1e-12 and np.abs(a[1] - b[1]).max() < 1e-12


def test_backend_selection():
    assert kernels.BACKEND in kernels.available_backends()
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def test_python_backend_forced_by_environment():
    env = dict(os.environ, ECSBELL_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", "from ecsbell import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
