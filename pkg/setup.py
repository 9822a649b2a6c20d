"""Build script: compiles the optional Cython kernel extension.

The extension is marked optional; if the build fails (no compiler, no
Cython) the package installs anyway and falls back to the pure-Python
kernels at import time.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "fragrect.kernels._ckernels",
                ["src/fragrect/kernels/_ckernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
