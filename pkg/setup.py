#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
from setuptools import setup, find_packages


NAME = "aotlab"
VERSION = "0.1.dev0"


setup(
    name=NAME,
    version=VERSION,
    description="aotlab - hierarchical multi-agent active object tracking in a 2D kinematic world",
    long_description=(
        "aotlab is a desk-scale laboratory for active object tracking. "
        "A kinematic tracker vehicle follows a moving target through four maps while a two-layer "
        "team of reinforcement-learning agents (detection, movement, obstacle and decision agents) "
        "with Mixture-of-Policies actors is trained with PPO and evaluated by episode length and "
        "cumulative reward."
    ),
    long_description_content_type="text/plain",
    author="aotlab developers",
    license="BSD",
    keywords=[
        "active object tracking",
        "reinforcement learning",
        "multi-agent",
        "mixture of experts",
        "PPO",
        "simulation",
    ],
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: BSD License",
        "Natural Language :: English",
        "Operating System :: Microsoft :: Windows",
        "Operating System :: Unix",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: Implementation :: CPython",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Programming Language :: Python :: 3 :: Only",
    ],
    platforms=[
        "windows",
        "linux",
    ],
    python_requires=">=3.9, <4",
    packages=find_packages(),
    install_requires=[
        "numpy>=1.21",
        "pandas>=1.3",
        # only pyomo.common.config is used, for the configuration layer
        "pyomo>=6.2",
        "plotly>=5.11",
        # static image export (svg/png) of plotly figures
        "kaleido",
    ],
    extras_require={
        "testing": [
            "pytest",
            "packaging",  # packaging is already a dependency of pytest, but we specify it here just in case
            "pyyaml",
        ],
    },
    include_package_data=True,
    package_data={
        # If any package contains these files, include them:
        "": [
            "*.json",
        ]
    },
    entry_points={
        "console_scripts": [
            "aotlab=aotlab.harness.cli:main",
        ]
    },
)
