from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/pcapstego/_kernels_cy.pyx"],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass  # pure-Python kernels are used when the extension is unavailable

setup(ext_modules=ext_modules)
