"""Build script: compiles the optional speedup extension when Cython and a C
compiler are present; the package falls back to pure Python otherwise."""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("MOLBENCH_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/molbench/kernels/_speedups.pyx"],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
