import json
import os
from pathlib import Path

import pytest

SOURCE_DIR = Path(os.environ.get("HYPERLAB_SOURCE_DIR", Path(__file__).resolve().parents[2]))


@pytest.fixture
def small_config():
    return {
        "seed": 3,
        "group": {
            "coupling": "full_product",
            "factor1": {"kind": "thin", "dilation_length": 2.5, "length": 3.0},
            "factor2": {"kind": "thin", "dilation_length": 2.5, "length": 3.0},
        },
        "orbit": {"radius": 10},
        "growth": {"factor_radius": 14},
    }


@pytest.fixture
def small_config_file(tmp_path, small_config):
    p = tmp_path / "small.json"
    p.write_text(json.dumps(small_config))
    return p
