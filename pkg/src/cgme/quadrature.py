"""Adaptive panel quadrature for smooth and oscillatory integrands.

Every panel is evaluated with a nested Gauss-Legendre pair: the 15-point
rule supplies the value, the 7-point rule the error reference.  Both rules
are open (no endpoint nodes), so integrands with removable endpoint
singularities or one-sided limits at panel edges are safe.  Refinement is
a deterministic worst-panel-first heap; summation order is fixed, so a
given integrand and config reproduce bit-identical results.

Integrands must be vectorized: ``f(x: ndarray) -> ndarray`` (real or
complex).  Two-dimensional square integrals are evaluated as iterated
adaptive integrals, with an optional triangular split along t2 = t1 for
kernels carrying a sign(t2 - t1) discontinuity.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

__all__ = [
    "QuadratureConfig",
    "QuadratureError",
    "integrate",
    "integrate_semi_infinite",
    "integrate_square_2d",
    "adapt_panels",
    "python_panel_evaluator",
    "GAUSS_LO_NODES",
    "GAUSS_LO_WEIGHTS",
    "GAUSS_HI_NODES",
    "GAUSS_HI_WEIGHTS",
]

GAUSS_LO_NODES, GAUSS_LO_WEIGHTS = np.polynomial.legendre.leggauss(7)
GAUSS_HI_NODES, GAUSS_HI_WEIGHTS = np.polynomial.legendre.leggauss(15)

# Hard ceiling on panels created in a single adaptive run; a request that
# needs more than this is a caller bug (tolerance or range absurd).
_MAX_PANELS = 2_000_000


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and budget for one adaptive integration."""

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 20000

    def __post_init__(self):
        if not (self.rel_tol > 0 and np.isfinite(self.rel_tol)):
            raise ValueError(f"rel_tol must be finite and > 0, got {self.rel_tol}")
        if not (self.abs_tol > 0 and np.isfinite(self.abs_tol)):
            raise ValueError(f"abs_tol must be finite and > 0, got {self.abs_tol}")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_CONFIG = QuadratureConfig()


class QuadratureError(RuntimeError):
    """Tolerance not reached; carries the best value and error estimate."""

    def __init__(self, message, value=None, error_estimate=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


def python_panel_evaluator(f):
    """Wrap a vectorized callable as a panel evaluator.

    The returned function maps interval arrays (lo, hi) to per-panel
    values and error estimates, evaluating ``f`` once on all nodes of all
    requested panels.
    """

    def evaluate(lo, hi):
        half = 0.5 * (hi - lo)
        mid = lo + half
        x_hi = mid[:, None] + half[:, None] * GAUSS_HI_NODES[None, :]
        x_lo = mid[:, None] + half[:, None] * GAUSS_LO_NODES[None, :]
        n_hi = x_hi.size
        y = np.asarray(f(np.concatenate([x_hi.ravel(), x_lo.ravel()])))
        y_hi = y[:n_hi].reshape(x_hi.shape)
        y_lo = y[n_hi:].reshape(x_lo.shape)
        vals = (y_hi @ GAUSS_HI_WEIGHTS) * half
        ref = (y_lo @ GAUSS_LO_WEIGHTS) * half
        errs = np.abs(vals - ref)
        return np.atleast_1d(vals), np.atleast_1d(errs)

    return evaluate


def adapt_panels(evaluator, edges, cfg=DEFAULT_CONFIG, scale_floor=0.0, refine_batch=8):
    """Adaptively refine panels until the summed error meets tolerance.

    evaluator: (lo (P,), hi (P,)) -> (values (P,), errors (P,)).
    scale_floor: extra scale entering the relative-tolerance target, for
        integrals whose value is small against a natural problem scale.
    refine_batch: worst panels bisected per round, batched into a single
        evaluator call to amortize evaluation overhead.

    Returns (value, error_estimate); raises QuadratureError with the best
    estimate attached if the subdivision budget is exhausted.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.size < 2:
        return 0.0 + 0.0j, 0.0
    if edges.size - 1 > _MAX_PANELS:
        raise QuadratureError(f"initial panel count {edges.size - 1} exceeds {_MAX_PANELS}")
    vals, errs = evaluator(edges[:-1], edges[1:])
    total = vals.sum()
    err_total = float(errs.sum())
    heap = []
    seq = 0
    for i in range(len(vals)):
        heap.append((-errs[i], seq, edges[i], edges[i + 1], vals[i], errs[i]))
        seq += 1
    heapq.heapify(heap)
    splits = 0
    while heap:
        tol = max(cfg.abs_tol, cfg.rel_tol * max(abs(total), scale_floor))
        if err_total <= tol:
            break
        if splits >= cfg.max_subdivisions or seq >= _MAX_PANELS:
            raise QuadratureError(
                f"tolerance {tol:.3e} not met after {splits} subdivisions "
                f"(error estimate {err_total:.3e})",
                value=total,
                error_estimate=err_total,
            )
        parents = []
        while heap and len(parents) < refine_batch:
            _, _, a, b, v, e = heapq.heappop(heap)
            m = 0.5 * (a + b)
            if a < m < b:
                parents.append((a, m, b, v, e))
            # else: panel at floating-point resolution; its contribution
            # stays in the totals, it just cannot be refined further.
        if not parents:
            break
        lo = np.empty(2 * len(parents))
        hi = np.empty(2 * len(parents))
        for i, (a, m, b, _, _) in enumerate(parents):
            lo[2 * i], hi[2 * i] = a, m
            lo[2 * i + 1], hi[2 * i + 1] = m, b
        v2, e2 = evaluator(lo, hi)
        for i, (a, m, b, v, e) in enumerate(parents):
            total += v2[2 * i] + v2[2 * i + 1] - v
            err_total += float(e2[2 * i] + e2[2 * i + 1]) - e
            heapq.heappush(heap, (-e2[2 * i], seq, a, m, v2[2 * i], e2[2 * i]))
            seq += 1
            heapq.heappush(
                heap, (-e2[2 * i + 1], seq, m, b, v2[2 * i + 1], e2[2 * i + 1])
            )
            seq += 1
        splits += len(parents)
    return total, err_total


def _seed_edges(a, b, osc_scale, breakpoints):
    pts = {float(a), float(b)}
    for p in breakpoints:
        p = float(p)
        if a < p < b:
            pts.add(p)
    pts = sorted(pts)
    cap = np.pi / osc_scale if osc_scale > 0 else np.inf
    edges = [pts[0]]
    for lo, hi in zip(pts[:-1], pts[1:]):
        width = hi - lo
        n = 1 if not np.isfinite(cap) else max(1, int(np.ceil(width / cap)))
        if n > _MAX_PANELS:
            raise QuadratureError(
                f"oscillation scale {osc_scale} demands {n} seed panels on [{lo}, {hi}]"
            )
        edges.extend(lo + width * (np.arange(1, n + 1) / n))
    return np.asarray(edges)


def integrate(
    f,
    a,
    b,
    cfg=DEFAULT_CONFIG,
    osc_scale=0.0,
    breakpoints=(),
    scale_floor=0.0,
    refine_batch=8,
):
    """Adaptive integral of a vectorized callable over [a, b].

    osc_scale s caps seed panels at width pi/s (the shortest oscillation
    wavelength the integrand carries).  breakpoints are interior points
    forced onto panel edges (kinks, peaks, discontinuities).
    Returns (value, error_estimate).
    """
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValueError("integration limits must be finite")
    if b <= a:
        return 0.0 + 0.0j, 0.0
    edges = _seed_edges(a, b, osc_scale, breakpoints)
    return adapt_panels(python_panel_evaluator(f), edges, cfg, scale_floor, refine_batch)


def integrate_semi_infinite(
    f,
    cfg=DEFAULT_CONFIG,
    oscillation_scale=0.0,
    full_line=False,
    decay_scale=None,
    scale_floor=0.0,
):
    """Integral of f over [0, inf), or (-inf, inf) with full_line.

    The half line is covered by geometrically growing chunks, each
    integrated adaptively; extension stops once two consecutive chunks
    contribute below a quarter of the running tolerance.  decay_scale
    hints the width of the first chunk (e.g. an exponential cutoff).
    Returns (value, error_estimate); raises QuadratureError if the tail
    has not become negligible within the chunk budget.
    """

    def half_line(g):
        c0 = float(decay_scale) if decay_scale else 1.0
        acc = 0.0 + 0.0j
        err = 0.0
        lo = 0.0
        width = c0
        small_streak = 0
        for _ in range(64):
            hi = lo + width
            v, e = integrate(g, lo, hi, cfg, oscillation_scale, scale_floor=scale_floor)
            acc += v
            err += e
            tol = max(cfg.abs_tol, cfg.rel_tol * max(abs(acc), scale_floor))
            if abs(v) <= 0.25 * tol:
                small_streak += 1
                if small_streak >= 2:
                    return acc, err
            else:
                small_streak = 0
            lo = hi
            width *= 2.0
        raise QuadratureError(
            "semi-infinite tail did not become negligible within the chunk budget",
            value=acc,
            error_estimate=err,
        )

    val, err = half_line(f)
    if full_line:
        v2, e2 = half_line(lambda x: f(-x))
        val += v2
        err += e2
    return val, err


def integrate_square_2d(
    kernel,
    delta_t,
    cfg=DEFAULT_CONFIG,
    diagonal_split=False,
    osc_scale_outer=0.0,
    osc_scale_inner=0.0,
    scale_floor=0.0,
):
    """Double integral of kernel(t1, t2) over the square [0, delta_t]^2.

    kernel must accept (t1: float, t2: ndarray) and return an ndarray.
    With diagonal_split the inner integral is evaluated separately on
    [0, t1] and [t1, delta_t], so kernels discontinuous across t2 = t1
    (sign factors) are integrated without smearing; for continuous
    kernels the split is a no-op up to tolerance.  The diagonal is always
    an inner breakpoint, which also serves kernels peaked at t2 = t1.
    Returns (value, error_estimate).
    """
    if delta_t <= 0:
        raise ValueError("delta_t must be > 0")
    inner_abs = max(
        0.25 * max(cfg.abs_tol, cfg.rel_tol * scale_floor) / delta_t, 1e-300
    )
    inner_cfg = QuadratureConfig(
        rel_tol=0.25 * cfg.rel_tol,
        abs_tol=inner_abs,
        max_subdivisions=cfg.max_subdivisions,
    )
    inner_errs = []

    def inner(t1):
        if diagonal_split:
            v = 0.0 + 0.0j
            e = 0.0
            for lo, hi in ((0.0, t1), (t1, delta_t)):
                if hi > lo:
                    vi, ei = integrate(
                        lambda t2: kernel(t1, t2), lo, hi, inner_cfg, osc_scale_inner
                    )
                    v += vi
                    e += ei
            return v, e
        return integrate(
            lambda t2: kernel(t1, t2),
            0.0,
            delta_t,
            inner_cfg,
            osc_scale_inner,
            breakpoints=(t1,),
        )

    def outer_f(t1_arr):
        out = np.empty(t1_arr.shape, dtype=complex)
        for i, t1 in enumerate(t1_arr):
            v, e = inner(float(t1))
            inner_errs.append(e)
            out[i] = v
        return out

    # Each outer panel evaluation launches 22 inner integrations, so the
    # outer refinement works panel by panel.
    val, outer_err = integrate(
        outer_f,
        0.0,
        delta_t,
        cfg,
        osc_scale_outer,
        scale_floor=scale_floor / delta_t if scale_floor else 0.0,
        refine_batch=1,
    )
    inner_part = delta_t * max(inner_errs) if inner_errs else 0.0
    return val, outer_err + inner_part
