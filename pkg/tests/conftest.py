import numpy as np
import pytest

from medoe import rng as medoe_rng
from medoe.envs import chainball as cb


@pytest.fixture(scope="session")
def target_tables():
    return cb.generate_target_tables(11, medoe_rng.stream(0, "chainball-tables"))


@pytest.fixture(scope="session")
def target_task(target_tables):
    return cb.make_target_task(target_tables)


@pytest.fixture(scope="session")
def def_task(target_tables):
    return cb.make_source_task(target_tables, "def", medoe_rng.stream(0, "chainball-tables", "def"))


@pytest.fixture(scope="session")
def att_task(target_tables):
    return cb.make_source_task(target_tables, "att", medoe_rng.stream(0, "chainball-tables", "att"))


@pytest.fixture()
def g():
    return medoe_rng.stream(0, "test")


def rel_err(a, b):
    denom = max(abs(a), abs(b), 1e-12)
    return abs(a - b) / denom


def assert_all_close(x, y, tol=1e-12):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    assert x.shape == y.shape
    assert np.max(np.abs(x - y)) <= tol, f"max abs diff {np.max(np.abs(x - y))}"
