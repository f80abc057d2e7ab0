import os
import subprocess
import sys

import numpy as np
import pytest

from xmjacobi import _kernels
from xmjacobi._kernels import numerov_compiled, numerov_python


def _problem(n=5000, seed=0):
    rng = np.random.default_rng(seed)
    f = rng.uniform(-5, 50, n)
    psi = np.zeros(n)
    psi[0], psi[1] = 1e-3, 1.1e-3
    return f, psi


def test_python_kernel_free_particle():
    h = 1e-3
    r = h * np.arange(1, 3001)
    psi = np.zeros_like(r)
    psi[0], psi[1] = np.sin(r[0]), np.sin(r[1])
    numerov_python(np.full_like(r, -1.0), psi, h * h, 1e150)
    assert np.max(np.abs(psi - np.sin(r))) < 1e-9


@pytest.mark.skipif(numerov_compiled is None, reason="compiled kernel not built")
def test_backends_agree_bitwise():
    f, psi_c = _problem()
    psi_p = psi_c.copy()
    nc = numerov_compiled(f, psi_c, 1e-6, 1e150)
    np_ = numerov_python(f, psi_p, 1e-6, 1e150)
    assert nc == np_
    assert np.array_equal(psi_c, psi_p)


@pytest.mark.skipif(numerov_compiled is None, reason="compiled kernel not built")
def test_backends_agree_with_rescaling():
    f = np.full(20000, 1e4)
    a, b = np.zeros(20000), np.zeros(20000)
    a[0] = b[0] = 1.0
    a[1] = b[1] = 1.1
    assert numerov_compiled(f, a, 1e-6, 1e150) == numerov_python(f, b, 1e-6, 1e150) > 0
    assert np.allclose(a, b, rtol=1e-14, atol=0)
    assert np.all(np.isfinite(a)) and np.max(np.abs(a)) <= 1e150


def test_dispatch_validates_inputs():
    with pytest.raises(TypeError):
        _kernels.numerov(np.zeros(5), [0.0] * 5, 1e-6)
    with pytest.raises(ValueError):
        numerov_python(np.zeros(5), np.zeros(4), 1e-6, 1e150)


def test_short_arrays_untouched():
    psi = np.array([1.0, 2.0])
    assert _kernels.numerov(np.zeros(2), psi, 1e-6) == 0
    assert list(psi) == [1.0, 2.0]


def test_env_var_forces_pure_python():
    code = "import xmjacobi._kernels as k; print(k.BACKEND)"
    env = dict(os.environ, XMJACOBI_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    env.pop("XMJACOBI_PURE_PYTHON")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == ("cython" if numerov_compiled is not None else "python")
