# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels.

Semantics match cgme._kernels_py exactly (that module is the reference
implementation and the fallback); see its docstrings.  Results agree with
the fallback to floating-point summation-order differences.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, expm1, fabs, sin

cnp.import_array()

cdef double[15] XH
cdef double[15] WH
cdef double[7] XL
cdef double[7] WL

def _init_rules():
    cdef int i
    from numpy.polynomial.legendre import leggauss
    xl, wl = leggauss(7)
    xh, wh = leggauss(15)
    for i in range(15):
        XH[i] = xh[i]
        WH[i] = wh[i]
    for i in range(7):
        XL[i] = xl[i]
        WL[i] = wl[i]

_init_rules()

cdef double complex CI = 1j

# Bernoulli numbers B_2..B_14.
cdef double[7] BERN
BERN[0] = 1.0 / 6.0
BERN[1] = -1.0 / 30.0
BERN[2] = 1.0 / 42.0
BERN[3] = -1.0 / 30.0
BERN[4] = 5.0 / 66.0
BERN[5] = -691.0 / 2730.0
BERN[6] = 7.0 / 6.0


cdef inline double _sinc(double x) nogil:
    if fabs(x) < 1e-4:
        return 1.0 - x * x / 6.0 * (1.0 - x * x / 20.0)
    return sin(x) / x


cdef inline double _gdens(double w, double beta, double inv_cutoff) nogil:
    cdef double x = beta * w
    cdef double cut = exp(-fabs(w) * inv_cutoff)
    if fabs(x) < 1e-4:
        return (1.0 + x * (0.5 + x / 12.0)) / beta * cut
    if x > 700.0:
        x = 700.0
    elif x < -700.0:
        x = -700.0
    return w / (-expm1(-x)) * cut


cdef inline double complex _trigamma(double complex z) nogil:
    cdef double complex acc = 0.0
    cdef double complex w, w2, s, term
    cdef int k = 0
    cdef int j
    while z.real * z.real + z.imag * z.imag < 225.0 and k < 64:
        acc = acc + 1.0 / (z * z)
        z = z + 1.0
        k += 1
    w = 1.0 / z
    w2 = w * w
    s = w + 0.5 * w2
    term = w * w2
    for j in range(7):
        s = s + BERN[j] * term
        term = term * w2
    return acc + s


def spectral_density_array(object omega, double beta, double inv_cutoff):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w = np.ascontiguousarray(
        np.atleast_1d(np.asarray(omega, dtype=np.float64))
    )
    cdef Py_ssize_t n = w.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            out[i] = _gdens(w[i], beta, inv_cutoff)
    return out


def sinc_array(object x):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xx = np.ascontiguousarray(
        np.atleast_1d(np.asarray(x, dtype=np.float64))
    )
    cdef Py_ssize_t n = xx.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            out[i] = _sinc(xx[i])
    return out


def correlation_closed(object u, double beta, double sigma):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] uu = np.ascontiguousarray(
        np.atleast_1d(np.asarray(u, dtype=np.float64))
    )
    cdef Py_ssize_t n = uu.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef double inv_b2 = 1.0 / (beta * beta)
    cdef double complex zp, zm
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            zp = sigma + CI * uu[i]
            zm = sigma - CI * uu[i]
            out[i] = 1.0 / (zp * zp) + (
                _trigamma(1.0 + zp / beta) + _trigamma(1.0 + zm / beta)
            ) * inv_b2
    return out


def spectral_sinc_panels(
    object lo,
    object hi,
    double beta,
    double inv_cutoff,
    double wa_eff,
    double wb_eff,
    double half_dt,
):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] el = np.ascontiguousarray(
        np.asarray(lo, dtype=np.float64)
    )
    cdef cnp.ndarray[cnp.float64_t, ndim=1] eh = np.ascontiguousarray(
        np.asarray(hi, dtype=np.float64)
    )
    cdef Py_ssize_t P = el.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vals = np.empty(P, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] errs = np.empty(P, dtype=np.float64)
    cdef Py_ssize_t p
    cdef int k
    cdef double a, h, m, x, fx, s_hi, s_lo
    with nogil:
        for p in range(P):
            a = el[p]
            h = 0.5 * (eh[p] - a)
            m = a + h
            s_hi = 0.0
            for k in range(15):
                x = m + h * XH[k]
                fx = _gdens(x, beta, inv_cutoff)
                fx *= _sinc((x + wa_eff) * half_dt) * _sinc((x + wb_eff) * half_dt)
                s_hi += WH[k] * fx
            s_lo = 0.0
            for k in range(7):
                x = m + h * XL[k]
                fx = _gdens(x, beta, inv_cutoff)
                fx *= _sinc((x + wa_eff) * half_dt) * _sinc((x + wb_eff) * half_dt)
                s_lo += WL[k] * fx
            vals[p] = s_hi * h
            errs[p] = fabs(s_hi - s_lo) * h
    return vals, errs
