from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; ghzforge.kernels falls back to numpy
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("ghzforge._kernels", ["src/ghzforge/_kernels.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
