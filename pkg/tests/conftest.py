import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qdilemma import fixture_path  # noqa: E402
from qdilemma.game import load_game  # noqa: E402
from qdilemma.mechanism import load_environment  # noqa: E402


@pytest.fixture
def table1():
    return load_game(fixture_path("table1.json"))


@pytest.fixture
def monotonic_env():
    return load_environment(fixture_path("monotonic_scr.json"))


@pytest.fixture
def nonmonotonic_env():
    return load_environment(fixture_path("nonmonotonic_scr.json"))


@pytest.fixture
def efficient_env():
    return load_environment(fixture_path("efficient_scr.json"))
