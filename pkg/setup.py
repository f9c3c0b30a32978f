import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled kernels are an optimisation, not a requirement: without a
# working Cython/C toolchain the package falls back to the pure-Python
# implementations in schematik.kernels._fallback.
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "schematik.kernels._native",
                ["src/schematik/kernels/_native.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        language_level=3,
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
