import os

import numpy
from setuptools import Extension, setup

# Compiled kernels are optional: set TORICORR_NO_EXT=1 to install the pure
# NumPy implementation only (toricorr.kernels falls back automatically).
ext_modules = []
if not os.environ.get("TORICORR_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "toricorr._kernels",
                    ["src/toricorr/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3", "-fopenmp"],
                    extra_link_args=["-fopenmp"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
