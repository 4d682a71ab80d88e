"""Builds the optional compiled simplex kernels.

If Cython or a C compiler is unavailable the package still installs and
falls back to the numpy kernels at import.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "dcbattery.lp._ckernel",
                ["src/dcbattery/lp/_ckernel.pyx"],
                # no FMA contraction: keeps results bit-identical to the numpy kernels
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
