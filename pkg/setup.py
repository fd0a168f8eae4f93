from setuptools import setup, find_packages

setup(
    name="allreduce_bounds",
    version="0.1.0",
    description="Cut-set upper bounds, MAC-BC tree-packing lower bounds and a symbol-level simulator for "
                "All-Reduce over networks of parallel links.",
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    packages=find_packages(include=["src", "src.*", "run_analysis", "run_analysis.*"]),
    install_requires=[
        "pandas",
        "numpy",
        "networkx",
        "sympy",
        "python-dotenv",
        "requests",
        "tabulate",
    ],
    entry_points={
        "console_scripts": ["allreduce=run_analysis.cli:main"],
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: System :: Networking",
    ],
    python_requires='>=3.10',
)
