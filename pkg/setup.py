"""Build script for the optional Cython kernels.

The extension is marked optional: if Cython or a C compiler is missing the
package installs with the pure-Python/numpy fallback kernels only.
"""
from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover - build-time only
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "gromovlab._kernels",
                ["src/gromovlab/_kernels.pyx"],
                include_dirs=[np.get_include()],
                # no -ffast-math: witness re-evaluation must be bitwise exact
                extra_compile_args=["-O2", "-ffp-contract=off"],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )

setup(ext_modules=ext_modules)
