"""Kernel backend selection.

The compiled extension (_core, Cython) is preferred when importable; the
numpy fallback (_fallback) is used otherwise.  Set MMWLINK_FORCE_NUMPY=1
to force the fallback, e.g. for benchmarking or debugging.
"""

import os

if os.environ.get("MMWLINK_FORCE_NUMPY") == "1":
    from . import _fallback as _impl

    BACKEND = "numpy"
else:
    try:
        from . import _core as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import _fallback as _impl

        BACKEND = "numpy"

polynomial_distort = _impl.polynomial_distort
phasor_rotate = _impl.phasor_rotate
conjugate_branch_filter = _impl.conjugate_branch_filter
tapped_delay_line = _impl.tapped_delay_line


def backend_name():
    """Return 'compiled' or 'numpy' depending on which kernels are active."""
    return BACKEND
