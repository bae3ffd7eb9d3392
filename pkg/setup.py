"""Build script: compiles the episode kernel when Cython is available.

The package works without the extension (a pure-Python kernel is selected at
import time), so any build failure here should degrade, not abort. Set
NOVAMAZE_NO_EXT=1 to skip the extension on purpose.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("NOVAMAZE_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "novamaze._kernel",
                    ["src/novamaze/_kernel.pyx"],
                    # Bit-identical arithmetic with CPython is a hard
                    # requirement (the parity tests assert it): no fused
                    # multiply-add, and no fusing sin+cos into sincos(),
                    # whose results can differ from sin()/cos() by 1 ulp.
                    # The fusion pass keys off libc support, not the sincos
                    # builtin, so sin/cos themselves must be opaque calls.
                    extra_compile_args=["-O3", "-ffp-contract=off",
                                        "-fno-builtin-sin",
                                        "-fno-builtin-cos"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
