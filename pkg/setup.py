import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("MMRANK_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "mmrank.flipgraph._walk",
                    ["src/mmrank/flipgraph/_walk.pyx"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        # No Cython available: install the pure-Python package only.
        ext_modules = []

setup(ext_modules=ext_modules)
