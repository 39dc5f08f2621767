#!/usr/bin/env python3
"""
QCCNN Lab - Setup file
"""
from setuptools import setup, find_packages

setup(
    name="qccnn-lab",
    version="1.0.0",
    description="Statevector laboratory for quantum data encodings, "
                "hybrid quantum-classical convolution and circuit metrics",
    author="Val",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    scripts=["qccnn_cli.py"],
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.22",
        "scipy>=1.8",
        "matplotlib>=3.5",
    ],
    extras_require={
        "test": ["pytest>=7"],
    },
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Physics",
    ],
)
