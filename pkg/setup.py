import os

from setuptools import setup

ext_modules = []
if os.environ.get("MATCHLOG_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/matchlog/_corehot.pyx"], language_level=3
        )
    except ImportError:
        # No Cython: install pure-Python only, the engine falls back at import.
        ext_modules = []

setup(ext_modules=ext_modules)
