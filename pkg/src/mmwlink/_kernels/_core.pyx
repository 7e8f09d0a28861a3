# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-sample kernels for the waveform chain.

Each function here has a numpy twin in _fallback.py with identical
semantics; tests assert agreement to 1e-12.  Keep signatures in sync.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin


def polynomial_distort(const double complex[::1] x,
                       const double complex[::1] coeffs,
                       double input_scale):
    """y[i] = sum_p coeffs[p] * u * |u|^(2p) with u = input_scale * x[i]."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t n_coeff = coeffs.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] y = out
    cdef double complex u, acc
    cdef double m2
    cdef Py_ssize_t i, p
    for i in range(n):
        u = input_scale * x[i]
        m2 = u.real * u.real + u.imag * u.imag
        acc = coeffs[n_coeff - 1]
        for p in range(n_coeff - 2, -1, -1):
            acc = acc * m2 + coeffs[p]
        y[i] = acc * u
    return out


def phasor_rotate(const double complex[::1] x, const double[::1] phi):
    """y[i] = x[i] * exp(1j * phi[i])."""
    cdef Py_ssize_t n = x.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] y = out
    cdef double c, s
    cdef Py_ssize_t i
    for i in range(n):
        c = cos(phi[i])
        s = sin(phi[i])
        y[i] = x[i] * (c + 1j * s)
    return out


def conjugate_branch_filter(const double complex[::1] x,
                            const double complex[::1] g_direct,
                            const double complex[::1] g_image):
    """y[n] = sum_t g_direct[t] x[n-t] + g_image[t] conj(x[n-t]), causal, same length."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t n_tap = g_direct.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] y = out
    cdef double complex xs
    cdef Py_ssize_t i, t
    for i in range(n):
        for t in range(n_tap if n_tap <= i + 1 else i + 1):
            xs = x[i - t]
            y[i] = y[i] + g_direct[t] * xs + g_image[t] * xs.conjugate()
    return out


def tapped_delay_line(const double complex[::1] x,
                      const long long[::1] delays,
                      const double complex[::1] gains):
    """y[n] = sum_i gains[i] * x[n - delays[i]], causal, same length."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t n_tap = delays.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] y = out
    cdef double complex g
    cdef long long d
    cdef Py_ssize_t i, t
    for t in range(n_tap):
        d = delays[t]
        g = gains[t]
        for i in range(d, n):
            y[i] = y[i] + g * x[i - d]
    return out
