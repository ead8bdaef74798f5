import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled core is optional: without Cython the package installs
# pure-Python and contactlab._backend falls back to the numpy kernels.
extensions = []
if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "contactlab._kernels_cy",
                ["src/contactlab/_kernels_cy.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=extensions)
