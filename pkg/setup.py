"""Build script for the optional Cython kernels.

The compiled module is optional: if Cython or a C compiler is missing the
package installs without it and ``nemx.kernels`` falls back to the pure
Python implementation.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("NEMX_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "nemx._ckernels",
                    ["src/nemx/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
