import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # build without the compiled core; the pure-Python fallback is used
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("mgpe._kernels", ["src/mgpe/_kernels.pyx"], include_dirs=[numpy.get_include()])],
        language_level=3,
    )

setup(ext_modules=ext_modules)
