import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("FRACVAR_NO_EXT", "") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        # the package still works through fracvar._pykernels
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "fracvar._ckernels",
                    ["src/fracvar/_ckernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    # keep x + f*dt + s*dW rounding identical to the Python fallback
                    extra_compile_args=["-O2", "-ffp-contract=off"],
                )
            ],
            language_level="3",
        )

setup(ext_modules=ext_modules)
