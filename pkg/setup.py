"""Build script for the optional compiled kernels.

The package is fully functional without the extension: shockflow.kernels
falls back to the numpy implementation when the compiled module is absent.
"""

import os

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    if not os.path.exists("src/shockflow/_cykernels.pyx"):
        raise SystemExit("missing src/shockflow/_cykernels.pyx")
    ext_modules = cythonize(
        [
            Extension(
                "shockflow._cykernels",
                ["src/shockflow/_cykernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
