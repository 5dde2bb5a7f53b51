"""Build script for the compiled ALS kernel.

The extension is optional: if Cython (or a C compiler) is unavailable the
package installs without it and falls back to the pure-NumPy kernel at
import time (see amrec.kernels).
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "amrec.kernels._als",
                ["src/amrec/kernels/_als.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
