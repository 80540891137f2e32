"""CMake-driven extension build for the walkdrift python module."""

import os
import subprocess
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        extdir = os.path.abspath(os.path.dirname(self.get_ext_fullpath(ext.name)))
        build_temp = os.path.abspath(self.build_temp)
        os.makedirs(build_temp, exist_ok=True)
        source_dir = os.path.abspath(os.path.dirname(__file__))
        cmake_args = [
            f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={extdir}",
            "-DCMAKE_BUILD_TYPE=Release",
            "-DWALKDRIFT_PYTHON_MODULE_ONLY=ON",
            f"-DPython3_EXECUTABLE={sys.executable}",
        ]
        subprocess.check_call(["cmake", "-S", source_dir, "-B", build_temp] + cmake_args)
        subprocess.check_call(
            ["cmake", "--build", build_temp, "--target", "_walkdrift", "-j"]
        )


setup(
    ext_modules=[CMakeExtension("walkdrift._walkdrift")],
    cmdclass={"build_ext": CMakeBuild},
)
