"""Build script: compiles the coordinate-ascent kernel when Cython is available.

The package is fully functional without the extension; qdbound._backend falls
back to the pure-numpy kernel at import time.
"""

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "qdbound._ascent",
                ["src/qdbound/_ascent.pyx"],
                include_dirs=[numpy.get_include()],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
