from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:
    # Pure-Python install: the package falls back to the interpreted event
    # loop in cltorus._pyloop (see cltorus.backend).
    extensions = []
else:
    extensions = cythonize(
        [
            Extension(
                "cltorus._core",
                ["src/cltorus/_core.pyx"],
                include_dirs=[numpy.get_include()],
                # -ffp-contract=off keeps the compiled loop bit-identical to
                # the pure-Python fallback (no FMA contraction).
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=extensions)
