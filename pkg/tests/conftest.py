import functools
from pathlib import Path

import numpy as np
import pytest

import pac_implicit.bench
from pac_implicit.bench.generators import resolve_problem
from pac_implicit.linarith.expr import VariableSet
from pac_implicit.linarith.parser import parse_atom, parse_expr, parse_formula

DATA_DIR = Path(pac_implicit.bench.__file__).parent / "data"


def pytest_configure(config):
    config.addinivalue_line("markers", "seed(value): seed of the rng fixture")
    config.addinivalue_line("markers", "slow: desk-scale experiment, only run with --run-slow")


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def rng(request):
    marker = request.node.get_closest_marker("seed")
    seed = marker.args[0] if marker else 0
    return np.random.default_rng(seed)


@pytest.fixture
def variables():
    return VariableSet(["x", "y", "z"])


@pytest.fixture
def parse(variables):
    """Parse an atom, an expression (no relation) or a multi-line formula over ``variables``."""

    def _parse(text: str):
        if "\n" in text.strip():
            return parse_formula(text, variables)
        if any(symbol in text for symbol in "<>=≤≥≠"):
            return parse_atom(text, variables)
        return parse_expr(text, variables)

    return _parse


@pytest.fixture(scope="session")
def problem_factory():
    @functools.cache
    def make_problem(name: str, dims: int | None = None, seed: int = 111921):
        return resolve_problem(name, dims, seed)

    return make_problem
