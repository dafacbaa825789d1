"""Build the optional compiled core.

If Cython or a C compiler is unavailable the package still installs and
``cp_dynamics._backend`` falls back to the pure-Python kernels.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "cp_dynamics._core",
                ["src/cp_dynamics/_core.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
