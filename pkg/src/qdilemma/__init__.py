"""Quantized Prisoners' Dilemma, PD protocol typology and Nash implementation checks."""
from pathlib import Path

__version__ = "0.1.0"

_FIXTURES = Path(__file__).with_name("fixtures")


def fixture_path(name: str) -> Path:
    """Path of a JSON fixture shipped with the package, e.g. ``"table1.json"``."""
    return _FIXTURES / name
