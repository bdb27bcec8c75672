import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("MEDOE_SKIP_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "medoe._kernels._core",
                    ["src/medoe/_kernels/_core.pyx"],
                    extra_compile_args=["-O3"],
                    language="c",
                )
            ],
            language_level=3,
        )
    except ImportError:
        # Pure-python kernels are a full fallback; the extension is a speedup.
        ext_modules = []

setup(ext_modules=ext_modules)
