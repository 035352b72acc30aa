#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
import importlib

import pytest


def test_import_main_package():
    import aotlab


@pytest.mark.unit
@pytest.mark.parametrize(
    "module",
    [
        "aotlab.agents.system",
        "aotlab.harness.cli",
        "aotlab.learn.training",
        "aotlab.mop.mixture",
        "aotlab.nncore.autodiff",
        "aotlab.rewards.components",
        "aotlab.sensing.observation",
        "aotlab.simworld.world",
        "aotlab.utilities.results",
    ],
)
def test_import_module(module):
    importlib.import_module(module)
