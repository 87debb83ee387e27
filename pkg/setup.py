"""Build script: compiles the optional Cython segmentation kernel.

The package is fully functional without the extension (a pure-Python
kernel is selected at import time), so any build failure here is
non-fatal.
"""

import os

from setuptools import setup

PYX = "src/kinmorph/_segment_cy.pyx"

ext_modules = []
if os.path.exists(PYX):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize([PYX], language_level=3)
        for ext in ext_modules:
            ext.optional = True
    except ImportError:
        pass

setup(ext_modules=ext_modules)
