"""Backend parity: the compiled kernels and the numpy fallback must agree."""

import numpy as np
import pytest

from mmwlink._kernels import _fallback, backend_name

_core = pytest.importorskip(
    "mmwlink._kernels._core", reason="compiled kernels not built on this install"
)

TOL = 1e-12


def _rng():
    return np.random.default_rng(12345)


def _rand_complex(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def test_backend_reports_a_known_name():
    assert backend_name() in ("compiled", "numpy")


def test_polynomial_distort_matches_fallback():
    rng = _rng()
    x = _rand_complex(rng, 4096)
    coeffs = np.array([1.0, -0.1 + 0.05j, -0.01, 3e-4, -1e-5], dtype=np.complex128)
    for scale in (1.0, 0.5):
        a = _core.polynomial_distort(x, coeffs, scale)
        b = _fallback.polynomial_distort(x, coeffs, scale)
        assert np.max(np.abs(a - b)) < TOL


def test_polynomial_distort_matches_direct_sum():
    rng = _rng()
    x = _rand_complex(rng, 512)
    coeffs = np.array([1.0, -0.1 + 0.05j, -0.01, 3e-4, -1e-5], dtype=np.complex128)
    scale = 0.7
    u = scale * x
    expected = sum(c * u * np.abs(u) ** (2 * p) for p, c in enumerate(coeffs))
    got = _core.polynomial_distort(x, coeffs, scale)
    assert np.max(np.abs(got - expected)) < 1e-10


def test_phasor_rotate_matches_fallback_and_formula():
    rng = _rng()
    x = _rand_complex(rng, 4096)
    phi = rng.standard_normal(4096)
    a = _core.phasor_rotate(x, phi)
    b = _fallback.phasor_rotate(x, phi)
    assert np.max(np.abs(a - b)) < TOL
    assert np.max(np.abs(a - x * np.exp(1j * phi))) < TOL


def test_conjugate_branch_filter_matches_fallback_and_convolution():
    rng = _rng()
    x = _rand_complex(rng, 1000)
    direct = np.array([0.98 + 0.01j, 0.02, -0.005j])
    image = np.array([0.02 - 0.01j, -0.01, 0.003])
    a = _core.conjugate_branch_filter(x, direct, image)
    b = _fallback.conjugate_branch_filter(x, direct, image)
    assert np.max(np.abs(a - b)) < TOL
    expected = np.convolve(x, direct)[:1000] + np.convolve(np.conj(x), image)[:1000]
    assert np.max(np.abs(a - expected)) < 1e-10


def test_tapped_delay_line_matches_fallback_and_dense_fir():
    rng = _rng()
    x = _rand_complex(rng, 1000)
    delays = np.array([0, 3, 11], dtype=np.int64)
    gains = np.array([0.8, 0.5 - 0.2j, 0.1j])
    a = _core.tapped_delay_line(x, delays, gains)
    b = _fallback.tapped_delay_line(x, delays, gains)
    assert np.max(np.abs(a - b)) < TOL
    dense = np.zeros(12, dtype=np.complex128)
    dense[delays] = gains
    expected = np.convolve(x, dense)[:1000]
    assert np.max(np.abs(a - expected)) < 1e-10
