from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # pure-Python install; edgecloud.kernels falls back to NumPy
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("edgecloud._grid_core", ["src/edgecloud/_grid_core.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
