import numpy as np
from setuptools import setup, Extension

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "walkguard.nn._convext",
                ["src/walkguard/nn/_convext.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        language_level="3",
    )
except ImportError:
    # pure-numpy fallback still works without the compiled core
    ext_modules = []

setup(ext_modules=ext_modules)
