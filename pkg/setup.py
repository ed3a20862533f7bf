"""Build script: compiles the optional accelerator extension.

The package is pure Python plus one optional Cython extension holding the
numerical hot loops.  If Cython or a C compiler is unavailable the build
falls back to the pure-NumPy implementations in ``tailcovar._kernels``.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "tailcovar._kernels._core",
                sources=["src/tailcovar/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:  # pragma: no cover - build-environment dependent
    extensions = []

setup(ext_modules=extensions)
