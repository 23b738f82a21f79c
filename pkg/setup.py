"""Builds the optional compiled kernel extension.

The package works without it (gdlayout._slow is the fallback), so the
extension is marked optional: a missing C toolchain degrades to the slow
path instead of failing the install.
"""

import numpy
from setuptools import setup
from setuptools.extension import Extension

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext = Extension(
        "gdlayout._ext",
        ["src/gdlayout/_ext.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    )
    ext_modules = cythonize([ext], language_level=3)

setup(ext_modules=ext_modules)
