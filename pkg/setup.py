import numpy
from setuptools import setup

try:
    from Cython.Build import cythonize
except ImportError:
    # Without Cython the package still installs; incratio.kernels falls back
    # to the pure-numpy implementation at import time.
    ext_modules = []
else:
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "incratio._core",
                ["src/incratio/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
