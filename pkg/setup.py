"""Build the optional Cython kernels.

When Cython, numpy headers or a C compiler are unavailable the package is
installed without the extension and ``qcomplexity.kernels`` falls back to the
pure-Python implementation.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("QCOMPLEXITY_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "qcomplexity._kernels",
                    ["src/qcomplexity/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                    optional=True,
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
