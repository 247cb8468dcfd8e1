"""Pure numpy implementations of the hot numerical kernels.

Mirrors the compiled extension ``cgme._kernels``; the active backend is
selected in ``cgme.kernels``.  Functions here are vectorized and free of
Python-level loops over array elements (apart from the bounded trigamma
recurrence sweep).
"""

from __future__ import annotations

import numpy as np

from .quadrature import (
    GAUSS_HI_NODES,
    GAUSS_HI_WEIGHTS,
    GAUSS_LO_NODES,
    GAUSS_LO_WEIGHTS,
)

# Bernoulli numbers B_2..B_14 for the trigamma asymptotic series.
_BERNOULLI = np.array(
    [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0]
)
_TRIGAMMA_SHIFT = 15.0


def spectral_density_array(omega, beta, inv_cutoff):
    """Thermal Ohmic spectral weight g(w) = e^{-|w|/wc} * w / (1 - e^{-beta w}).

    inv_cutoff is 1/wc.  The w = 0 removable point and its neighbourhood
    |beta w| < 1e-4 go through the series branch 1/beta * (1 + x/2 + x^2/12);
    large |x| is clamped so the Bose factor under/overflows gracefully.
    """
    w = np.asarray(omega, dtype=float)
    x = beta * w
    cut = np.exp(-np.abs(w) * inv_cutoff)
    small = np.abs(x) < 1e-4
    xc = np.clip(np.where(small, 1.0, x), -700.0, 700.0)
    with np.errstate(over="ignore"):
        regular = w / (-np.expm1(-xc))
    series = (1.0 + x * (0.5 + x / 12.0)) / beta
    return np.where(small, series, regular) * cut


def sinc_array(x):
    """sin(x)/x with sinc(0) = 1, series branch below 1e-4."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    x2 = x * x
    return np.where(small, 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0), np.sin(xs) / xs)


def _trigamma(z):
    """Trigamma function on the right half plane (Re z >= 1), complex."""
    z = np.array(z, dtype=complex)
    acc = np.zeros_like(z)
    for _ in range(16):
        mask = np.abs(z) < _TRIGAMMA_SHIFT
        if not mask.any():
            break
        zm = z[mask]
        acc[mask] += 1.0 / (zm * zm)
        z[mask] = zm + 1.0
    w = 1.0 / z
    w2 = w * w
    s = w + 0.5 * w2
    term = w * w2
    for b in _BERNOULLI:
        s = s + b * term
        term = term * w2
    return acc + s


def correlation_closed(u, beta, sigma):
    """Closed form of the Ohmic bath correlation function G(u).

    G(u) = 1/(sigma + iu)^2
         + [psi_1(1 + (sigma + iu)/beta) + psi_1(1 + (sigma - iu)/beta)] / beta^2

    with sigma = 1/wc; the second term is the Matsubara resummation of the
    thermal coth part.  Matches the semi-infinite quadrature definition to
    machine precision.
    """
    u = np.asarray(u, dtype=float)
    zp = sigma + 1j * u
    zm = sigma - 1j * u
    vac = 1.0 / (zp * zp)
    thermal = (_trigamma(1.0 + zp / beta) + _trigamma(1.0 + zm / beta)) / (beta * beta)
    return vac + thermal


def spectral_sinc_panels(lo, hi, beta, inv_cutoff, wa_eff, wb_eff, half_dt):
    """Per-panel Gauss 15/7 sums of g(w)*sinc((w+wa)A)*sinc((w+wb)A).

    lo/hi: panel interval bounds (P,) each; A = half_dt.  Returns
    (values, error estimates), both real (P,).  This is the production
    integrand of the frequency-domain dissipative coefficients.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    half = 0.5 * (hi - lo)
    mid = lo + half

    def f(nodes):
        g = spectral_density_array(nodes, beta, inv_cutoff)
        return (
            g
            * sinc_array((nodes + wa_eff) * half_dt)
            * sinc_array((nodes + wb_eff) * half_dt)
        )

    x_hi = mid[:, None] + half[:, None] * GAUSS_HI_NODES[None, :]
    x_lo = mid[:, None] + half[:, None] * GAUSS_LO_NODES[None, :]
    vals = (f(x_hi) @ GAUSS_HI_WEIGHTS) * half
    ref = (f(x_lo) @ GAUSS_LO_WEIGHTS) * half
    return vals, np.abs(vals - ref)
