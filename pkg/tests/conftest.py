import json

import pytest

GL_CONFIG = {
    "model": "geometric_levy",
    "Q": [[-0.5, 0.5], [0.5, -0.5]],
    "mu": [0.15, 0.05],
    "sigma": [0.1, 0.1],
    "g": [-0.2, -0.1],
    "lambda": 1.0,
    "y0": 10.0,
    "initial_regime": 0,
}

SURPLUS_CONFIG = {
    "model": "surplus",
    "Q": [[-1.0, 1.0], [1.0, -1.0]],
    "lambda_per_regime": [1.0, 2.0],
    "claim_mean": 1.0,
    "u": 5.0,
    "initial_regime": 0,
}


@pytest.fixture
def write_config(tmp_path):
    def _write(doc, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc, indent=2) + "\n")
        return path

    return _write
