import pathlib
import random
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

GOLDEN = pathlib.Path(__file__).parent / "golden"


@pytest.fixture
def rng():
    return random.Random(20260821)


@pytest.fixture(scope="session")
def golden_dir():
    return GOLDEN


def golden_files(kind: str):
    return sorted((GOLDEN / kind).glob("*.deriv"))
