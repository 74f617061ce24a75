from setuptools import Extension, setup

# The compiled kernel is optional: without Cython (or a C compiler) the
# package falls back to the pure-numpy implementation at import time.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "casimirkit._plane_kernel_c",
                ["src/casimirkit/_plane_kernel_c.pyx"],
                optional=True,
            )
        ],
        language_level="3",
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
