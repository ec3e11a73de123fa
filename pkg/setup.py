"""Build script for the optional compiled similarity kernel.

The package works without the extension (a pure-Python fallback is
selected at import time), so a failed Cython build is not fatal to
development installs done with --no-build-isolation.
"""

from setuptools import setup
from setuptools.extension import Extension

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("ctxcollapse._gestalt", ["src/ctxcollapse/_gestalt.pyx"])],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
