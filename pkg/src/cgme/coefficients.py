"""Finite coarse-graining-time coefficient blocks and their assembly.

The dissipative blocks are

    D^(ab)_{ee'}(dt) = (2/dt) int_0^dt int_0^dt dt1 dt2
                       e^{i(e w_a t1 - e' w_b t2)} G(t2 - t1)

computed two ways: true 2-D quadrature in the time domain (the reference
oracle path) and a 1-D frequency integral (the production path),

    D^(ab)_{ee'}(dt) = 2 dt e^{i(e w_a - e' w_b) dt/2}
                       int dw g(w) sinc((w + e w_a) dt/2) sinc((w + e' w_b) dt/2).

The Hamiltonian blocks carry the sign(t2 - t1) kernel and prefactor
-i/dt.  The overall constant is calibrated so the coinciding-frequency
asymptotics come out as 4*pi*g(-e*w_a) on the diagonal; with it the
large-dt and high-temperature closed forms used by the witness module
hold exactly.

Index convention: epsilon index 0 is +1, index 1 is -1, matching the row
order of the transform matrix PSI = (1/2)[[1, i], [1, -i]].  Pauli index
i in {1, 2} refers to sigma_1, sigma_2; the sigma_3 eigenbasis is ordered
(uu, ud, du, dd) with sigma_3 |u> = +|u>.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bath as bath_mod
from . import kernels
from .bath import BathSpectrum, spectral_density
from .quadrature import (
    DEFAULT_CONFIG,
    QuadratureError,
    adapt_panels,
    integrate,
    integrate_square_2d,
)

__all__ = [
    "SystemConfig",
    "CoefficientBlock",
    "KossakowskiMatrix",
    "LambShiftInteraction",
    "ConsistencyError",
    "PSI",
    "EPS",
    "dissipative_block_time_domain",
    "dissipative_block_frequency_domain",
    "hamiltonian_block",
    "psi_transform",
    "kossakowski",
    "lamb_shift_interaction",
    "single_qubit_shift",
    "clear_cache",
]

EPS = (1, -1)
PSI = 0.5 * np.array([[1.0, 1.0j], [1.0, -1.0j]])

HERMITICITY_TOL = 1e-10
PSD_TOL = 1e-8
REALITY_TOL = 1e-8


class ConsistencyError(RuntimeError):
    """A validated structural property (PSD, reality) failed beyond tolerance."""


@dataclass(frozen=True)
class SystemConfig:
    """Two-qubit system: frequencies, coarse-graining time, coupling."""

    omega1: float
    omega2: float
    delta_t: float
    lam: float = 0.1

    def __post_init__(self):
        for name in ("omega1", "omega2", "delta_t"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v}")
        if not (np.isfinite(self.lam) and self.lam >= 0):
            raise ValueError(f"lam must be finite and >= 0, got {self.lam}")

    @property
    def delta_omega(self) -> float:
        """Half the frequency splitting (omega2 - omega1) / 2."""
        return 0.5 * (self.omega2 - self.omega1)

    def omega(self, a: int) -> float:
        if a == 1:
            return self.omega1
        if a == 2:
            return self.omega2
        raise ValueError(f"qubit index must be 1 or 2, got {a}")


def _eps_index(eps: int) -> int:
    if eps == 1:
        return 0
    if eps == -1:
        return 1
    raise ValueError(f"epsilon must be +1 or -1, got {eps}")


@dataclass
class CoefficientBlock:
    """2x2 block indexed by (epsilon, epsilon') in {+1, -1} (order +, -)."""

    entries: np.ndarray
    kind: str
    qubit_pair: tuple

    def entry(self, eps: int, eps_prime: int) -> complex:
        return complex(self.entries[_eps_index(eps), _eps_index(eps_prime)])


@dataclass
class KossakowskiMatrix:
    """4x4 dissipator coefficient matrix, indexed (qubit a, Pauli i).

    entries is the PSD-clamped matrix including the coupling factor
    lambda^2; raw_min_eigenvalue records the smallest eigenvalue before
    the clamp (a quadrature-noise diagnostic).
    """

    entries: np.ndarray
    raw_min_eigenvalue: float
    norm: float

    def block(self, a: int, b: int) -> np.ndarray:
        return self.entries[2 * (a - 1) : 2 * a, 2 * (b - 1) : 2 * b]


@dataclass
class LambShiftInteraction:
    """Real 2x2 matrix h: bath-mediated sigma_i x sigma_j coupling weights."""

    h: np.ndarray
    imag_residual: float


_overlap_cache: dict = {}
_block_cache: dict = {}


def clear_cache():
    _overlap_cache.clear()
    _block_cache.clear()


def _tail_cutoff(bath, w_max, half_dt, target):
    """Frequency beyond which the sinc-product tail is below target."""
    omega_c = bath.omega_c
    beta = bath.beta

    def bound(om):
        return (
            4.0
            / (half_dt * half_dt)
            * np.exp(-om / omega_c)
            * (omega_c / om)
            * (1.0 + 2.0 / (beta * om))
        )

    omega = max(2.0, 4.0 * w_max, 8.0 / half_dt)
    while bound(omega) > target:
        omega *= 1.5
        if omega > 1e9:
            raise QuadratureError("no finite cutoff reaches the tail target")
    return omega


def _sinc_overlap(bath, wa_eff, wb_eff, delta_t, cfg, scale):
    """int dw g(w) sinc((w+wa)dt/2) sinc((w+wb)dt/2), memoized; real."""
    lo, hi = sorted((float(wa_eff), float(wb_eff)))
    key = (bath.beta, bath.omega_c, lo, hi, delta_t, cfg.rel_tol, cfg.abs_tol)
    hit = _overlap_cache.get(key)
    if hit is not None:
        return hit
    half_dt = 0.5 * delta_t
    target = 0.05 * max(cfg.abs_tol, cfg.rel_tol * scale)
    w_max = max(abs(wa_eff), abs(wb_eff))
    omega_lim = _tail_cutoff(bath, w_max, half_dt, target)
    inv_cutoff = 1.0 / bath.omega_c
    cap = np.pi / half_dt
    breaks = sorted({0.0, -wa_eff, -wb_eff})
    edges = [-omega_lim]
    for p in breaks + [omega_lim]:
        seg = p - edges[-1]
        n = max(1, int(np.ceil(seg / min(cap, omega_lim / 4.0))))
        edges.extend(edges[-1] + seg * (np.arange(1, n + 1) / n))
    edges = np.asarray(edges)

    def evaluator(lo, hi):
        return kernels.spectral_sinc_panels(
            lo, hi, bath.beta, inv_cutoff, wa_eff, wb_eff, half_dt
        )

    val, err = adapt_panels(evaluator, edges, cfg, scale_floor=scale)
    result = (float(np.real(val)), float(err))
    _overlap_cache[key] = result
    return result


def _reference_scale(bath, sys):
    """Scale regularizer for block tolerances: g at the first qubit frequency."""
    return max(spectral_density(bath, sys.omega1), 1e-300)


def dissipative_block_frequency_domain(bath, sys, a, b, cfg=DEFAULT_CONFIG):
    """Dissipative block via the 1-D spectral representation (production path)."""
    key = (bath, sys.omega1, sys.omega2, sys.delta_t, a, b, "Dfreq", cfg)
    hit = _block_cache.get(key)
    if hit is not None:
        return hit
    wa, wb = sys.omega(a), sys.omega(b)
    dt = sys.delta_t
    g_ref = _reference_scale(bath, sys)
    entries = np.empty((2, 2), dtype=complex)
    for i, e in enumerate(EPS):
        for j, ep in enumerate(EPS):
            val, _ = _sinc_overlap(bath, e * wa, ep * wb, dt, cfg, 0.5 * g_ref)
            phase = np.exp(0.5j * (e * wa - ep * wb) * dt)
            entries[i, j] = 2.0 * dt * phase * val
    block = CoefficientBlock(entries=entries, kind="D", qubit_pair=(a, b))
    _block_cache[key] = block
    return block


def _square_kernel(bath, sys, a, b, e, ep, correlation_fn, signed):
    wa = e * sys.omega(a)
    wb = ep * sys.omega(b)
    if correlation_fn is None:
        beta, sigma = bath.beta, bath.sigma

        def gfun(u):
            return kernels.correlation_closed(u, beta, sigma)

    else:
        gfun = correlation_fn

    if signed:

        def kernel(t1, t2):
            u = t2 - t1
            return (
                np.exp(1j * (wa * t1 - wb * t2))
                * np.sign(u)
                * np.asarray(gfun(u), dtype=complex)
            )

    else:

        def kernel(t1, t2):
            return np.exp(1j * (wa * t1 - wb * t2)) * np.asarray(
                gfun(t2 - t1), dtype=complex
            )

    return kernel


def dissipative_block_time_domain(
    bath, sys, a, b, cfg=DEFAULT_CONFIG, correlation_fn=None
):
    """Dissipative block via true 2-D quadrature of the defining double
    integral (the reference oracle path; makes no factorization assumption).

    correlation_fn overrides the bath correlation function (test hook);
    it must map an ndarray of time differences to complex values.
    """
    cacheable = correlation_fn is None
    key = (bath, sys.omega1, sys.omega2, sys.delta_t, a, b, "Dtime", cfg)
    if cacheable:
        hit = _block_cache.get(key)
        if hit is not None:
            return hit
    dt = sys.delta_t
    g_ref = _reference_scale(bath, sys)
    scale_2d = 0.5 * dt * dt * g_ref
    entries = np.empty((2, 2), dtype=complex)
    for i, e in enumerate(EPS):
        for j, ep in enumerate(EPS):
            kernel = _square_kernel(bath, sys, a, b, e, ep, correlation_fn, False)
            val, _ = integrate_square_2d(
                kernel,
                dt,
                cfg,
                diagonal_split=False,
                osc_scale_outer=sys.omega(a),
                osc_scale_inner=sys.omega(b),
                scale_floor=scale_2d,
            )
            entries[i, j] = 2.0 / dt * val
    block = CoefficientBlock(entries=entries, kind="D", qubit_pair=(a, b))
    if cacheable:
        _block_cache[key] = block
    return block


def _reduced_entry(bath, sys, a, b, e, ep, cfg, signed, correlation_fn=None):
    """One (epsilon, epsilon') entry via the exact time-difference
    reduction of the double integral: substituting u = t2 - t1 turns the
    inner t1 integral into a closed-form exponential, leaving

        int_{-dt}^{dt} du S(u) (dt - |u|) e^{i gamma u}
            e^{i k (dt - u)/2} sinc(k (dt - |u|)/2)

    with gamma = -ep*w_b, k = e*w_a - ep*w_b, and S = sign*G or G.
    Returns the double-integral value (no 2/dt or -i/dt prefactor).
    """
    dt = sys.delta_t
    wa, wb = sys.omega(a), sys.omega(b)
    gamma = -ep * wb
    k = e * wa - ep * wb
    if correlation_fn is None:
        beta, sigma = bath.beta, bath.sigma

        def gfun(u):
            return kernels.correlation_closed(u, beta, sigma)

    else:
        gfun = correlation_fn

    def f(u):
        au = np.abs(u)
        g = np.asarray(gfun(u), dtype=complex)
        if signed:
            g = g * np.sign(u)
        width = dt - au
        return (
            g
            * width
            * np.exp(1j * (gamma * u + 0.5 * k * (dt - u)))
            * kernels.sinc_array(0.5 * k * width)
        )

    g_ref = _reference_scale(bath, sys)
    val, _ = integrate(
        f,
        -dt,
        dt,
        cfg,
        osc_scale=abs(gamma) + 0.5 * abs(k),
        breakpoints=(0.0,),
        scale_floor=0.5 * dt * g_ref,
    )
    return val


def hamiltonian_block(
    bath, sys, a, b, cfg=DEFAULT_CONFIG, correlation_fn=None, method="square"
):
    """Lamb-shift block with the sign(t2 - t1) kernel.

    method="square": 2-D quadrature over [0, dt]^2 with the domain split
    into triangles along the discontinuity (the defining computation).
    method="reduced": exact 1-D time-difference reduction of the same
    integral (used on large parameter grids; agrees with the square path
    to quadrature tolerance).
    """
    if method not in ("square", "reduced"):
        raise ValueError(f"method must be 'square' or 'reduced', got {method!r}")
    cacheable = correlation_fn is None
    key = (bath, sys.omega1, sys.omega2, sys.delta_t, a, b, "H" + method, cfg)
    if cacheable:
        hit = _block_cache.get(key)
        if hit is not None:
            return hit
    dt = sys.delta_t
    g_ref = _reference_scale(bath, sys)
    scale_2d = 0.5 * dt * dt * g_ref
    entries = np.empty((2, 2), dtype=complex)
    for i, e in enumerate(EPS):
        for j, ep in enumerate(EPS):
            if method == "square":
                kernel = _square_kernel(bath, sys, a, b, e, ep, correlation_fn, True)
                val, _ = integrate_square_2d(
                    kernel,
                    dt,
                    cfg,
                    diagonal_split=True,
                    osc_scale_outer=sys.omega(a),
                    osc_scale_inner=sys.omega(b),
                    scale_floor=scale_2d,
                )
            else:
                val = _reduced_entry(bath, sys, a, b, e, ep, cfg, True, correlation_fn)
            entries[i, j] = -1j / dt * val
    block = CoefficientBlock(entries=entries, kind="H", qubit_pair=(a, b))
    if cacheable:
        _block_cache[key] = block
    return block


def psi_transform(block) -> np.ndarray:
    """Psi^dagger M Psi for a CoefficientBlock or bare 2x2 matrix."""
    m = block.entries if isinstance(block, CoefficientBlock) else np.asarray(block)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    return PSI.conj().T @ m @ PSI


def kossakowski(bath, sys, cfg=DEFAULT_CONFIG, method="frequency") -> KossakowskiMatrix:
    """Assemble the 4x4 coefficient matrix lambda^2 * [Psi^dag D^(ab) Psi].

    Blocks (1,1), (2,2), (1,2) are quadratured; (2,1) is the exact
    adjoint mirror D^(21) = D^(12)^dagger (an identity of the defining
    integrals), so Hermiticity holds to machine precision.  Eigenvalues
    in [-tol, 0) are clamped to zero; anything below -tol signals an
    inconsistency and raises.
    """
    if method == "frequency":
        block_fn = dissipative_block_frequency_domain
    elif method == "time":
        block_fn = dissipative_block_time_domain
    else:
        raise ValueError(f"method must be 'frequency' or 'time', got {method!r}")
    d11 = block_fn(bath, sys, 1, 1, cfg).entries
    d22 = block_fn(bath, sys, 2, 2, cfg).entries
    d12 = block_fn(bath, sys, 1, 2, cfg).entries
    d21 = d12.conj().T
    c = np.empty((4, 4), dtype=complex)
    for (a, b), blk in (((1, 1), d11), ((1, 2), d12), ((2, 1), d21), ((2, 2), d22)):
        c[2 * (a - 1) : 2 * a, 2 * (b - 1) : 2 * b] = psi_transform(blk)
    c *= sys.lam**2
    c = 0.5 * (c + c.conj().T)
    norm = float(np.linalg.norm(c, 2)) if np.any(c) else 0.0
    eigvals, eigvecs = np.linalg.eigh(c)
    raw_min = float(eigvals.min()) if norm else 0.0
    if raw_min < -PSD_TOL * max(norm, 1e-300):
        raise ConsistencyError(
            f"Kossakowski matrix min eigenvalue {raw_min:.3e} below "
            f"-{PSD_TOL:.0e} * norm ({norm:.3e}); quadrature or convention bug"
        )
    clamped = (eigvecs * np.clip(eigvals, 0.0, None)) @ eigvecs.conj().T
    clamped = 0.5 * (clamped + clamped.conj().T)
    return KossakowskiMatrix(entries=clamped, raw_min_eigenvalue=raw_min, norm=norm)


def lamb_shift_interaction(bath, sys, cfg=DEFAULT_CONFIG, method="reduced") -> LambShiftInteraction:
    """Bath-mediated qubit-qubit coupling matrix h (real, not symmetric).

    h = Psi^dag H^(12) Psi + (Psi^dag H^(21) Psi)^T with both blocks
    quadratured independently; the imaginary residue must stay below
    tolerance or a ConsistencyError is raised.  Coupling-constant free:
    lambda^2 is applied at generator assembly.
    """
    h12 = hamiltonian_block(bath, sys, 1, 2, cfg, method=method)
    h21 = hamiltonian_block(bath, sys, 2, 1, cfg, method=method)
    h = psi_transform(h12) + psi_transform(h21).T
    norm = float(np.linalg.norm(h))
    residual = float(np.linalg.norm(h.imag))
    if residual > REALITY_TOL * max(norm, 1e-300):
        raise ConsistencyError(
            f"lamb shift imaginary residue {residual:.3e} exceeds "
            f"{REALITY_TOL:.0e} * norm ({norm:.3e})"
        )
    return LambShiftInteraction(h=np.ascontiguousarray(h.real), imag_residual=residual)


def single_qubit_shift(bath, sys, a, cfg=DEFAULT_CONFIG, method="reduced") -> np.ndarray:
    """Coefficient matrix M = Psi^dag H^(aa) Psi of the single-qubit
    Lamb-shift term sum_ij M_ij sigma_i sigma_j on qubit a (Hermitian)."""
    haa = hamiltonian_block(bath, sys, a, a, cfg, method=method)
    m = psi_transform(haa)
    residual = float(np.linalg.norm(m - m.conj().T))
    norm = float(np.linalg.norm(m))
    if residual > 2.0 * REALITY_TOL * max(norm, 1e-300):
        raise ConsistencyError(
            f"single-qubit shift Hermiticity residue {residual:.3e} "
            f"exceeds tolerance (norm {norm:.3e})"
        )
    return 0.5 * (m + m.conj().T)
