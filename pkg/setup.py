"""Build script: compiles the optional sieve-marking kernel.

The compiled kernel is a pure speedup; if Cython or a C compiler is missing
the package installs anyway and falls back to the numpy implementation
(selected at import in primerace._kernels).
"""
from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "primerace._kernels._sieve_cy",
                ["src/primerace/_kernels/_sieve_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
