# Builds the optional Cython kernel.  The package works without it (a pure
# Python fallback is selected at import time), so compilation failures are
# downgraded to a warning rather than aborting the install.
import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "shpoints._kernels",
                ["src/shpoints/_kernels.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover
    sys.stderr.write(f"warning: Cython kernel not built ({exc}); "
                     "falling back to pure Python kernels\n")

setup(ext_modules=ext_modules)
