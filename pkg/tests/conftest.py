import importlib.util
import sys
from pathlib import Path

import numpy as np
import pytest

from ppii import equalize_histogram

_SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def _load_script(name: str):
    spec = importlib.util.spec_from_file_location(name, _SCRIPTS / f"{name}.py")
    module = importlib.util.module_from_spec(spec)
    sys.modules[name] = module
    spec.loader.exec_module(module)
    return module


@pytest.fixture(scope="session")
def dataset_script():
    return _load_script("make_synthetic_dataset")


@pytest.fixture(scope="session")
def phantoms(dataset_script):
    """Four equalized 160x160 synthetic radiographs from one stream."""
    rng = np.random.default_rng(1)
    return [
        equalize_histogram(dataset_script.synthetic_radiograph(rng, size=160))
        for _ in range(4)
    ]
