"""Build script: compiles the optional Cython kernel extension.

The extension is marked optional; if no compiler (or no Cython) is
available the install proceeds and the package falls back to the pure
numpy kernels at import time.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "cgme._kernels",
                ["src/cgme/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        compiler_directives={"language_level": 3, "embedsignature": True},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
