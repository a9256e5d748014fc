from pathlib import Path

import numpy as np
import pytest

from src.ingest import from_literal, read_canonical

FIXTURES = Path(__file__).parent / "fixtures"


def node(name, time, children=(), **frame):
    """Literal-tree node; ``time`` is a scalar or a per-rank list"""
    return {"frame": {"name": name, **frame}, "metrics": {"time": time}, "children": list(children)}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def run_a():
    return read_canonical(FIXTURES / "run_a.json")


@pytest.fixture
def run_b():
    return read_canonical(FIXTURES / "run_b.json")


@pytest.fixture
def chain():
    """main(2) -> solve(3) -> leaf(4), one rank"""
    return from_literal(node("main", 2.0, [node("solve", 3.0, [node("leaf", 4.0)])]), exec_id="chain")
