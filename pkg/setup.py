"""Build script for the optional compiled kernel extension.

The package works without the extension (a pure-Python backend is selected at
import time), so the build is marked optional: a failed compile degrades to the
fallback instead of breaking the install.
"""

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "fdinc._kernels._native",
        ["src/fdinc/_kernels/_native.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        optional=True,
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
