import os

from setuptools import Extension, setup

# Set HMSIM_NO_EXT=1 to install without the compiled kernels.
ext_modules = []
if not os.environ.get("HMSIM_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension("hmsim._speedups", ["src/hmsim/_speedups.pyx"], extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
