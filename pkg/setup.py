"""Build script: compiles the optional Cython kernel lane when possible.

The package is fully functional without the extension (a NumPy lane with the
same interface is selected at import time); the extension only accelerates the
large lattice folds.  Any failure here must therefore degrade to a pure build,
not break the install.
"""
from __future__ import annotations

import numpy as np
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "quinturb._kern._fast",
                ["src/quinturb/_kern/_fast.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - environment dependent
    print(f"quinturb: building without compiled kernels ({exc!r})")

setup(ext_modules=ext_modules)
