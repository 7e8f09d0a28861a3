"""Build script for the optional compiled kernel core.

The package is pure Python plus one Cython extension holding the per-sample
hot loops.  If Cython or a C compiler is unavailable the build degrades to
the numpy fallback implementations in mmwlink._kernels._fallback; the
installed package selects whichever is present at import time.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "mmwlink._kernels._core",
                ["src/mmwlink/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
