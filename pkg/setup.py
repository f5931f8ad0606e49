"""Build script: compiles the optional fast kernel extension.

The package works without the extension (a numpy reference backend is
selected at import time), so any failure here degrades to a pure-Python
install instead of aborting.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext = Extension(
        "ecomarl.kernels._native",
        ["src/ecomarl/kernels/_native.pyx"],
        include_dirs=[numpy.get_include()],
        # -ffp-contract=off: no FMA contraction, so the compiled kernels
        # stay bitwise-identical to the numpy reference backend.
        extra_compile_args=["-O3", "-ffp-contract=off"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    ext_modules = cythonize([ext], language_level="3")
except Exception as exc:  # noqa: BLE001
    print(f"ecomarl: skipping native kernel build ({exc}); using numpy backend")

setup(ext_modules=ext_modules)
