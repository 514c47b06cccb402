"""A setuptools based setup module."""

from pathlib import Path

from setuptools import find_packages, setup

here = Path(__file__).parent


# Get the long description from the README file
with open(here / "README.md", encoding="utf-8") as f:
    long_description = f.read()

setup(
    name="recbayes",
    version="0.1.0",
    description="Recurrent Bayesian team-task identification for ad hoc teamwork in gridworlds.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.11",
    ],
    keywords="ad-hoc-teamwork multi-agent pomdp bayesian gru gridworld level-based-foraging predator-prey",
    packages=find_packages(exclude=["contrib", "docs", "tests"]),
    python_requires=">=3.10, <4",
    install_requires=[
        "numpy",
        "scipy",
        "matplotlib",
        "tqdm",
        "fire",
    ],
    extras_require={
        "dev": [
            "pytest",
        ]
    },
    entry_points={"console_scripts": ["recbayes=recbayes.cli:main"]},
)
