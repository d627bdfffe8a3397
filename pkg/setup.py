"""Build script: compiles the optional planner kernel extension.

The package works without the extension (a numpy fallback is selected at
import time); building it just makes plan-grid evaluation several times
faster. Any failure here falls back to a pure-python install.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "critnav._kernels._plan_c",
                ["src/critnav/_kernels/_plan_c.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
