from setuptools import Extension, setup
from Cython.Build import cythonize

ext = Extension(
    "wtdecode._enum_cy",
    ["src/wtdecode/_enum_cy.pyx"],
)

setup(ext_modules=cythonize([ext], language_level=3))
