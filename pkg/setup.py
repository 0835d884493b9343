import os

import numpy as np
from setuptools import Extension, setup


def extensions():
    """Compiled Gibbs-sweep kernel; the package falls back to NumPy without it."""
    if os.environ.get("LBDE_SKIP_EXTENSION"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "lbde._kernels._csweep",
        ["src/lbde/_kernels/_csweep.pyx"],
        include_dirs=[np.get_include()],
        library_dirs=[os.path.join(np.random.__path__[0], "lib")],
        libraries=["npyrandom"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level="3")


setup(ext_modules=extensions())
