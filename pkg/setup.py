"""Build script for the optional compiled kernel extension.

The package works without the extension (a pure-numpy fallback is selected
at import time); building it just makes training faster.  To compile in
place for development:

    python setup.py build_ext --inplace
"""

from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "mpboost._backend._ckernels",
                ["src/mpboost/_backend/_ckernels.pyx"],
                # -ffp-contract=off keeps the C arithmetic bit-identical to
                # the numpy fallback (no FMA fusion of a*b - c).
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
