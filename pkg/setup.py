"""Builds the optional compiled kernels; the package falls back to numpy without them."""

import os
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing or failing: keep the pure path
            print(f"warning: compiled kernels not built ({exc})", file=sys.stderr)


ext_modules = []
if os.environ.get("BEATTY_LAB_NO_EXT", "") in ("", "0"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("beatty_lab._ckernels", ["src/beatty_lab/_ckernels.pyx"],
                       include_dirs=[numpy.get_include()],
                       define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                       extra_compile_args=["-O3", "-fno-math-errno"])],
            compiler_directives={"language_level": 3},
        )
    except Exception as exc:
        print(f"warning: skipping compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
