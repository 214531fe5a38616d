"""Build the optional compiled kernel extension.

The package works without it (uolsim falls back to the pure-Python
kernels); a failed compile degrades to a warning.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("uolsim._kernels", ["src/uolsim/_kernels.pyx"], optional=True)],
        language_level="3",
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
