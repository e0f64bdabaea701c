import os

from setuptools import Extension, setup

# The compiled kernel is optional: without Cython (or with SOFTFINGER_NO_EXT=1)
# the package falls back to the pure-Python kernels at import time.
ext_modules = []
if not os.environ.get("SOFTFINGER_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "softfinger._kernels._fast",
                    ["src/softfinger/_kernels/_fast.pyx"],
                    # Bit-identical results vs the pure-Python kernels:
                    # no FMA contraction, and no sin+cos -> sincos folding
                    # (glibc sincos can differ from sin/cos by 1 ulp).
                    extra_compile_args=[
                        "-O2",
                        "-ffp-contract=off",
                        "-fno-builtin-sin",
                        "-fno-builtin-cos",
                    ],
                )
            ],
            language_level=3,
        )

setup(ext_modules=ext_modules)
