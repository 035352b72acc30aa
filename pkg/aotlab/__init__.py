#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
from importlib import metadata


__version__ = metadata.version("aotlab")
