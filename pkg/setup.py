from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension(
        "termforge._core",
        ["src/termforge/_core.pyx"],
        language="c++",
        extra_compile_args=["-O2", "-std=c++17", "-pthread"],
        extra_link_args=["-pthread"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
