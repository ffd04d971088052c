"""Build the compiled LCS kernel.

The extension is optional at runtime: paralign.lcs falls back to the pure
Python kernel when the compiled module is absent.

    python setup.py build_ext --inplace
"""

from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension(
        "paralign.lcs._hs_cy",
        ["src/paralign/lcs/_hs_cy.pyx"],
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
