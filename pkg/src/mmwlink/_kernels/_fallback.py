"""Pure-numpy twins of the compiled kernels in _core.pyx.

Used when the extension is not built or when MMWLINK_FORCE_NUMPY=1.
Semantics must match _core exactly; tests compare both to 1e-12.
"""

import numpy as np


def polynomial_distort(x, coeffs, input_scale):
    """y[i] = sum_p coeffs[p] * u * |u|^(2p) with u = input_scale * x[i]."""
    u = input_scale * np.asarray(x, dtype=np.complex128)
    m2 = u.real * u.real + u.imag * u.imag
    acc = np.full_like(u, coeffs[-1])
    for c in coeffs[-2::-1]:
        acc = acc * m2 + c
    return acc * u


def phasor_rotate(x, phi):
    """y[i] = x[i] * exp(1j * phi[i])."""
    phi = np.asarray(phi)
    return np.asarray(x, dtype=np.complex128) * (np.cos(phi) + 1j * np.sin(phi))


def conjugate_branch_filter(x, g_direct, g_image):
    """y[n] = sum_t g_direct[t] x[n-t] + g_image[t] conj(x[n-t]), causal, same length."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[0]
    y = np.convolve(x, g_direct)[:n]
    y += np.convolve(np.conj(x), g_image)[:n]
    return y


def tapped_delay_line(x, delays, gains):
    """y[n] = sum_i gains[i] * x[n - delays[i]], causal, same length."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[0]
    y = np.zeros(n, dtype=np.complex128)
    for d, g in zip(delays, gains):
        if d < n:
            y[d:] += g * x[: n - d]
    return y
