"""Build script: compiles the optional n-gram counting extension.

The package is fully functional without the extension; metric kernels fall
back to the pure-Python implementation at import time.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/mbrkit/metrics/_ngram_cy.pyx"],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
