"""Build script: compiles the optional fast-kernel extension.

The package is fully functional without the extension (a pure-Python
fallback is selected at import time), so a missing compiler or Cython
only costs speed, never correctness.  Set ISD_SKIP_EXT=1 to force a
pure-Python install.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible, otherwise install pure Python."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: fast-kernel extension not built ({exc}); "
                  "falling back to pure Python kernels")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: failed to compile {ext.name} ({exc}); "
                  "falling back to pure Python kernels")


def make_ext_modules():
    if os.environ.get("ISD_SKIP_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "isdtwin._kernels._core",
        sources=["src/isdtwin/_kernels/_core.pyx"],
    )
    return cythonize([ext], language_level="3")


setup(ext_modules=make_ext_modules(), cmdclass={"build_ext": OptionalBuildExt})
