#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
from enum import Enum


class Role(Enum):
    detection = 0
    movement = 1
    obstacle = 2
    decision = 3


ACTION_DIMS = {
    Role.detection: 4,
    Role.movement: 2,
    Role.obstacle: 1,
    Role.decision: 2,
}

FIRST_LAYER = (Role.detection, Role.movement, Role.obstacle)

# a_d (4) + a_n (2) + a_a (1)
FIRST_LAYER_WIDTH = sum(ACTION_DIMS[r] for r in FIRST_LAYER)
