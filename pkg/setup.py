"""Build the optional Cython kernels; the package falls back to Python without them."""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("FLAGVORTEX_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("flagvortex.lie._ckernels", ["src/flagvortex/lie/_ckernels.pyx"], extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
