"""Build script: compiles the optional fast kernels.

The extension is optional; when the build fails (no compiler, no Cython) the
package falls back to the pure-numpy kernels at import time.
"""
import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "linbai._speedups",
                ["src/linbai/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    sys.stderr.write(f"linbai: skipping compiled kernels ({exc}); pure-python fallback will be used\n")

setup(ext_modules=ext_modules)
