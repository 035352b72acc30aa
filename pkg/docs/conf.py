#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
# Configuration file for the Sphinx documentation builder.
import os
import sys

sys.path.insert(0, os.path.abspath(".."))


project = "aotlab"
copyright = "2024, the aotlab developers"
author = "The aotlab developers"

release = "0.1.dev0"
version = "0.1.dev0"


extensions = [
    "sphinx_rtd_theme",
    "sphinx.ext.napoleon",  # Google and NumPy-style docstrings
    "sphinx.ext.autodoc",
    "sphinx.ext.mathjax",
    "sphinx.ext.viewcode",
    "sphinx.ext.autosectionlabel",
    "myst_parser",
]

autosectionlabel_prefix_document = True
autodoc_warningiserror = False  # suppress warnings during autodoc

exclude_patterns = ["_build", "Thumbs.db", ".DS_Store", "apidoc/*tests*"]

html_theme = "sphinx_rtd_theme"

myst_enable_extensions = [
    "dollarmath",
    "deflist",
    "colon_fence",
    "linkify",
]
myst_heading_anchors = 2
