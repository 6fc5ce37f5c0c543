"""Build script for the optional compiled sampling kernel.

The package is fully functional without the extension (a NumPy fallback is
selected at import time), so a failed compile only costs speed. Cython is
used when available; otherwise the pre-generated C file is compiled.
"""

import os
import warnings

import numpy
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext
from setuptools.errors import CCompilerError, ExecError, PlatformError

PYX = os.path.join("src", "dsmsim", "_invcdf.pyx")
C_SRC = os.path.join("src", "dsmsim", "_invcdf.c")


def make_extensions():
    try:
        from Cython.Build import cythonize

        return cythonize(
            [
                Extension(
                    "dsmsim._invcdf",
                    [PYX],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        if os.path.exists(C_SRC):
            return [
                Extension(
                    "dsmsim._invcdf",
                    [C_SRC],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ]
        warnings.warn("Cython not available and no generated C source; "
                      "building without the compiled kernel")
        return []


class OptionalBuildExt(build_ext):
    """Degrade to the pure-NumPy backend if compilation fails."""

    def run(self):
        try:
            super().run()
        except (CCompilerError, ExecError, PlatformError, FileNotFoundError) as exc:
            warnings.warn(f"compiled sampling kernel skipped: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except (CCompilerError, ExecError, PlatformError, ValueError) as exc:
            warnings.warn(f"compiled sampling kernel skipped: {exc}")


setup(ext_modules=make_extensions(), cmdclass={"build_ext": OptionalBuildExt})
