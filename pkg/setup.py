"""Build script: compiles the optional Cython split-scan kernel.

The package works without the extension (a NumPy fallback is selected at
import time), so the build is marked optional and failures are non-fatal.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "dagsynth._splitscan",
                ["src/dagsynth/_splitscan.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
