import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext = Pybind11Extension(
    "atmocat._atmocat",
    sorted(glob.glob("src/*.cpp")) + ["python/src/module.cpp"],
    include_dirs=["include", "vendor"],
    libraries=["expat", "sqlite3", "z", "crypto", "pthread"],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
