from setuptools import find_namespace_packages, setup

setup(
    name="pyorbifold",
    version="0.1.0",
    description="Orbifold state sums on ordered triangulations: Frobenius algebras in 2D, fusion data in 3D",
    packages=find_namespace_packages(include=["core", "core.*", "modules", "modules.*"]),
    py_modules=["main"],
    python_requires=">=3.8",
    install_requires=["numpy>=1.22"],
    extras_require={"test": ["pytest>=7.0"]},
    entry_points={"console_scripts": ["pyorbifold=modules.cli.run:main"]},
)
