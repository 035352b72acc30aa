#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Test that the license header opens every source file
"""
from pathlib import Path

import pytest

yaml = pytest.importorskip("yaml", reason="pyyaml not available")


@pytest.fixture
def package_root():
    import aotlab

    return Path(aotlab.__file__).parent


@pytest.fixture
def header_config(package_root):
    conf_file = package_root.parent / ".addheader.yml"
    if not conf_file.exists():
        pytest.skip(f"no header configuration at {conf_file}; not a development checkout")
    with open(conf_file) as f:
        return yaml.safe_load(f)


@pytest.fixture
def header_lines(package_root, header_config):
    text = (package_root.parent / header_config["text"]).read_text()
    return [f"# {line}".rstrip() for line in text.splitlines()]


@pytest.mark.unit
def test_headers(package_root, header_config, header_lines):
    missing = []
    for pattern in header_config["patterns"]:
        for path in package_root.rglob(pattern):
            if path.stat().st_size == 0:
                continue
            opening = path.read_text().splitlines()[1 : len(header_lines) + 1]
            if opening != header_lines:
                missing.append(str(path.relative_to(package_root)))
    assert missing == [], f"missing headers: {', '.join(sorted(missing))}"
