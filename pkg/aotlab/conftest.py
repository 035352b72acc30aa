#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
from _pytest.config import Config


_MARKERS = {
    "unit": "quick tests that do not touch the filesystem, must run in < 2 s",
    "component": "quick tests that write files, run the CLI or render figures",
    "integration": "long duration tests (training and evaluation runs)",
}


def pytest_configure(config: Config):

    for name, descr in _MARKERS.items():
        config.addinivalue_line("markers", f"{name}: {descr}")
