"""Build shim for the compiled Euler-Maruyama kernel.

The extension is optional: without it the package falls back to the
numpy stepper in omsqueeze._em_fallback (selected at import time in
omsqueeze.kernels).
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "omsqueeze._em_core",
                ["src/omsqueeze/_em_core.pyx"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
