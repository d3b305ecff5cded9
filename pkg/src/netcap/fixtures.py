"""Bundled example networks, construction scripts, and mapping files.

Fixture networks ship as data files and are regenerated from their
construction scripts by the test suite.  `load_network` accepts either a
fixture name or a path to a network document.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .netmodel import Network, parse_network

_DATA = resources.files(__package__) / "data"

NETWORKS = (
    "butterfly",
    "butterfly_noside",
    "tworail",
    "contention",
    "relay",
    "diamond",
    "uniform24_net",
    "graphic_net",
    "fano_net",
)


def fixture_names() -> tuple:
    return NETWORKS


def fixture_text(name: str) -> str:
    path = _DATA / f"{name}.json"
    if not path.is_file():
        raise FileNotFoundError(f"no fixture named {name!r}")
    return path.read_text()


def load_fixture(name: str) -> Network:
    return parse_network(fixture_text(name))


def load_network(spec: str) -> Network:
    """Network from a file path, or from a bundled fixture by name."""
    p = Path(spec)
    if p.is_file():
        return parse_network(p.read_text())
    if spec in NETWORKS:
        return load_fixture(spec)
    raise FileNotFoundError(
        f"{spec!r} is neither a file nor a known fixture {NETWORKS}"
    )


def script_text(name: str) -> str:
    path = _DATA / "scripts" / f"{name}.script"
    if not path.is_file():
        raise FileNotFoundError(f"no construction script named {name!r}")
    return path.read_text()


def data_path(filename: str) -> str:
    return str(_DATA / filename)
