"""Build script: compiles the exact-arithmetic kernel when Cython is available.

Set STEKLOVHEAT_PURE=1 to skip the extension and install the pure-Python
kernel only (the package selects the fallback automatically at import).
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("STEKLOVHEAT_PURE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/steklovheat/_kernel_cy.pyx"],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
