"""Build the optional compiled kernels.

If Cython or a C compiler is unavailable the package installs without the
extension and ``ecsbell.kernels`` falls back to the pure-Python versions.
"""
import os

import numpy as np
from setuptools import setup

ext_modules = []
if os.environ.get("ECSBELL_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "ecsbell._kernels",
                    ["src/ecsbell/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
