"""Build glue for the optional compiled kernel module.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile degrades the install instead of breaking it.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/roundforge/_speedups.pyx",
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )
    include_dirs = [numpy.get_include()]
    for ext in ext_modules:
        ext.include_dirs = include_dirs
except Exception as exc:  # pragma: no cover
    import sys

    print(f"roundforge: building without compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
