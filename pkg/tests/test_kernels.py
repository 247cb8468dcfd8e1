"""Backend agreement: compiled extension vs the numpy reference kernels."""

import numpy as np
import pytest

from cgme import _kernels_py
from cgme import kernels

try:
    from cgme import _kernels as compiled
except ImportError:
    compiled = None

needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled kernels not built")

RNG = np.random.default_rng(20240811)


def test_backend_reports_identity():
    assert kernels.BACKEND in ("python", "compiled")
    if compiled is None:
        assert kernels.BACKEND == "python"


@needs_compiled
def test_spectral_density_parity():
    w = np.concatenate([RNG.uniform(-50, 50, 200), [0.0, 1e-9, -1e-9, 3e5, -3e5]])
    for beta, inv_cut in [(0.01, 1e-3), (1.0, 0.1), (10.0, 0.5)]:
        a = compiled.spectral_density_array(w, beta, inv_cut)
        b = _kernels_py.spectral_density_array(w, beta, inv_cut)
        np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-300)


@needs_compiled
def test_sinc_parity():
    x = np.concatenate([RNG.uniform(-100, 100, 200), [0.0, 1e-9, -2e-5]])
    np.testing.assert_allclose(
        compiled.sinc_array(x), _kernels_py.sinc_array(x), rtol=1e-14, atol=0
    )


@needs_compiled
def test_correlation_closed_parity():
    u = np.concatenate([RNG.uniform(-40, 40, 200), [0.0]])
    for beta, sigma in [(0.01, 1e-3), (1.0, 1.0), (10.0, 0.1)]:
        a = compiled.correlation_closed(u, beta, sigma)
        b = _kernels_py.correlation_closed(u, beta, sigma)
        np.testing.assert_allclose(a, b, rtol=1e-12)


@needs_compiled
def test_spectral_sinc_panels_parity():
    lo = np.sort(RNG.uniform(-30, 30, 64))
    hi = lo + RNG.uniform(0.01, 0.8, 64)
    for beta, inv_cut, wa, wb, half_dt in [
        (0.1, 0.01, -1.0, -1.2, 5.0),
        (10.0, 0.1, 1.0, -1.0, 2.5),
    ]:
        va, ea = compiled.spectral_sinc_panels(lo, hi, beta, inv_cut, wa, wb, half_dt)
        vb, eb = _kernels_py.spectral_sinc_panels(lo, hi, beta, inv_cut, wa, wb, half_dt)
        np.testing.assert_allclose(va, vb, rtol=1e-11, atol=1e-16)
        np.testing.assert_allclose(ea, eb, rtol=1e-6, atol=1e-16)


def test_trigamma_against_mpmath():
    mp = pytest.importorskip("mpmath")
    zs = [1.5 + 0j, 2.0 + 3.7j, 1.0 + 120.0j, 14.9 + 0.3j, 1.0001 - 55j, 30.0 + 1e4j]
    mine = _kernels_py._trigamma(np.array(zs))
    for z, got in zip(zs, mine):
        ref = complex(mp.polygamma(1, mp.mpc(z)))
        assert abs(got - ref) <= 1e-13 * abs(ref)


def test_spectral_density_series_branch_is_smooth():
    # no jump across the series/regular switch at |beta w| = 1e-4
    beta = 2.0
    for sign in (1.0, -1.0):
        w = sign * np.array([1e-4 - 1e-12, 1e-4 + 1e-12]) / beta
        g = _kernels_py.spectral_density_array(w, beta, 0.01)
        assert abs(g[0] - g[1]) < 1e-11 / beta
