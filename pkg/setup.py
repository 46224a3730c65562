"""Build script for the optional compiled distance-transform kernel.

The package is pure Python except for lusa/raster/_edt_cy.pyx.  If the
extension cannot be built the install still succeeds and the runtime
falls back to the pure-Python kernel.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "lusa.raster._edt_cy",
                ["src/lusa/raster/_edt_cy.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
