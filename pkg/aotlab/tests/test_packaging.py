#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
from importlib import metadata, resources

import pytest
from packaging.version import Version

from aotlab import __version__
from aotlab.simworld.maps import BUILTIN_MAPS


@pytest.mark.unit
class TestVersion:
    @pytest.fixture
    def parsed_version(self) -> Version:
        return Version(__version__)

    def test_version_is_normalized(self, parsed_version: Version):
        assert __version__ == parsed_version.public == str(parsed_version)

    def test_release_components(self, parsed_version: Version):
        expected = 2 if parsed_version.is_devrelease else 3
        assert len(parsed_version.release) == expected


@pytest.mark.unit
def test_console_script():
    entry_points = metadata.distribution("aotlab").entry_points
    scripts = {ep.name: ep.value for ep in entry_points if ep.group == "console_scripts"}
    assert scripts == {"aotlab": "aotlab.harness.cli:main"}


@pytest.mark.unit
def test_builtin_maps_are_packaged():
    files = resources.files("aotlab.case_studies")
    for name in BUILTIN_MAPS:
        assert files.joinpath(f"{name}.json").is_file()
