import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from carnot import preset  # noqa: E402


@pytest.fixture
def engel():
    return preset("engel")


@pytest.fixture
def engel_first():
    return preset("engel-first")


@pytest.fixture
def heis():
    return preset("heisenberg1")


@pytest.fixture
def rng():
    return random.Random(20240611)
