import os

import numpy
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("OPTOENT_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "optoent._kernels._rk4",
                    ["src/optoent/_kernels/_rk4.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
