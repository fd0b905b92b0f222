"""Build script.

The package works without a compiler: the compiled kernel module is
optional and the runtime falls back to the pure-Python reference
implementation when the extension is absent (see dlgdkit._kernels).
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    # -fno-builtin-* stops the compiler from fusing the cos/sin pair in the
    # Box-Muller step into a single sincos() call, which can differ from the
    # separate libm calls by one ulp and would break bit-identity with the
    # pure-Python backend (which goes through the math module).
    ext_modules = cythonize(
        [
            Extension(
                "dlgdkit._kernels._speedups",
                ["src/dlgdkit/_kernels/_speedups.pyx"],
                extra_compile_args=[
                    "-fno-builtin-sincos",
                    "-fno-builtin-cos",
                    "-fno-builtin-sin",
                ],
                optional=True,
            )
        ],
        language_level="3",
    )
except ImportError:
    # No Cython available: install as pure Python.
    pass

setup(ext_modules=ext_modules)
