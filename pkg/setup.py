import numpy as np
from setuptools import Extension, setup

# The compiled quadrature kernel is optional: the package falls back to the
# NumPy implementation when the extension is unavailable.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "qgranger._kernels._price_cy",
                ["src/qgranger/_kernels/_price_cy.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
