"""Ohmic heat-bath correlation function and spectral density.

Natural units hbar = k_B = 1 throughout; frequencies and temperatures are
dimensionless.  The bath is Ohmic with an exponential (Debye) cutoff:

    G(t) = int_0^inf dw e^{-w/wc} w (coth(beta w / 2) cos(wt) - i sin(wt))

equivalently G(t) = int_{-inf}^{inf} dw g(w) e^{-iwt} with the thermal
spectral weight g(w) = e^{-|w|/wc} w / (1 - e^{-beta w}).  Three routes to
G are provided: per-point semi-infinite quadrature (with error estimate),
an exact closed form (vacuum term plus Matsubara/trigamma resummation),
and the analytic imaginary part used as an oracle in tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .quadrature import DEFAULT_CONFIG, integrate_semi_infinite

__all__ = [
    "BathSpectrum",
    "spectral_density",
    "correlation",
    "correlation_with_estimate",
    "correlation_closed_form",
    "correlation_imag_closed_form",
]


@dataclass(frozen=True)
class BathSpectrum:
    """Ohmic environment: inverse temperature beta, Debye cutoff omega_c."""

    beta: float
    omega_c: float

    def __post_init__(self):
        for name in ("beta", "omega_c"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v}")

    @property
    def sigma(self) -> float:
        """Cutoff time scale 1/omega_c (width of the vacuum peak of G)."""
        return 1.0 / self.omega_c


def spectral_density(bath: BathSpectrum, omega):
    """Thermal spectral weight g(w); scalar in, scalar out (arrays pass through).

    g(-w) = e^{-beta w} g(w) (detailed balance) and g(0) = 1/beta.
    """
    w = np.asarray(omega, dtype=float)
    if not np.all(np.isfinite(w)):
        raise ValueError("omega must be finite")
    out = kernels.spectral_density_array(w.ravel(), bath.beta, 1.0 / bath.omega_c)
    out = np.asarray(out).reshape(w.shape)
    return float(out) if np.isscalar(omega) or w.shape == () else out


def _correlation_integrand(bath: BathSpectrum, t: float):
    beta = bath.beta
    inv_wc = 1.0 / bath.omega_c

    def f(w):
        x = beta * w
        small = np.abs(x) < 1e-4
        xs = np.where(small, 1.0, x)
        # w*coth(beta w/2) -> 2/beta * (1 + x^2/12) near 0; tanh saturates
        # instead of overflowing at large x.
        wcoth = np.where(
            small,
            (2.0 / beta) * (1.0 + x * x / 12.0),
            w / np.tanh(0.5 * xs),
        )
        damp = np.exp(-w * inv_wc)
        return damp * (wcoth * np.cos(w * t) - 1j * w * np.sin(w * t))

    return f


def correlation_with_estimate(bath: BathSpectrum, t: float, cfg=DEFAULT_CONFIG):
    """G(t) by adaptive semi-infinite quadrature; returns (value, error estimate)."""
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    # |G(0)| ~ wc^2 + 2 wc / beta; a small fraction of it floors the
    # relative-tolerance target so oscillatory cancellation at large t
    # cannot demand accuracy below the integrand's dynamic range.
    scale0 = bath.omega_c**2 + 2.0 * bath.omega_c / bath.beta
    return integrate_semi_infinite(
        _correlation_integrand(bath, float(t)),
        cfg,
        oscillation_scale=abs(t),
        decay_scale=bath.omega_c,
        scale_floor=1e-4 * scale0,
    )


def correlation(bath: BathSpectrum, t: float, cfg=DEFAULT_CONFIG) -> complex:
    """G(t) by quadrature.  Satisfies G(-t) = conj(G(t)) to tolerance."""
    value, _ = correlation_with_estimate(bath, t, cfg)
    return complex(value)


def correlation_closed_form(bath: BathSpectrum, t):
    """Exact G(t): 1/(sigma+it)^2 plus the trigamma Matsubara sum.

    Vectorized; this is the fast evaluator consumed by the time-domain
    coefficient quadratures.
    """
    tt = np.asarray(t, dtype=float)
    out = kernels.correlation_closed(tt.ravel(), bath.beta, bath.sigma)
    out = np.asarray(out).reshape(tt.shape)
    return complex(out) if tt.shape == () else out


def correlation_imag_closed_form(bath: BathSpectrum, t):
    """Im G(t) = -2 sigma t / (sigma^2 + t^2)^2, temperature independent."""
    tt = np.asarray(t, dtype=float)
    s = bath.sigma
    out = -2.0 * s * tt / (s * s + tt * tt) ** 2
    return float(out) if tt.shape == () else out
