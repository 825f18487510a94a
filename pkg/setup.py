import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python fallback is used at import time
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("AGENTREG_NO_EXT"):
    ext_modules = cythonize(
        [
            Extension(
                "agentreg._ckernels",
                ["src/agentreg/_ckernels.pyx"],
                # bit-identical results with the Python fallback need strict IEEE ordering
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
