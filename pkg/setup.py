import os
from setuptools import setup
from setuptools import find_packages


__version__ = None
with open("src/degroot/version.py", "r") as f:
    exec(f.read())

# Allow setup.py to be run from any path
os.chdir(os.path.normpath(os.path.join(os.path.abspath(__file__), os.pardir)))

# Get proper long description for package
with open("README.md", "r") as f:
    description = f.read()


setup(
    name="degroot-influence",
    version=__version__,
    packages=find_packages('src'),
    package_dir={'': 'src'},
    include_package_data=True,
    zip_safe=True,
    description="DeGroot opinion formation with a temporary external stubborn agent",
    long_description=description,
    long_description_content_type='text/markdown',
    test_suite="tests",
    python_requires=">=3.8",
    install_requires=[
        "numpy>=1.20",
        "networkx>=2.5",
        "pandas>=1.5",
        "matplotlib>=3.3",
        "toml>=0.10",
    ],
    entry_points={
        "console_scripts": [
            "degroot-influence = degroot.cli:main",
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Natural Language :: English",
        "Operating System :: OS Independent",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3 :: Only",
        "Programming Language :: Python :: Implementation :: CPython",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Sociology",
    ],
)
