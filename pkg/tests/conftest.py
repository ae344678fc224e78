"""Root conftest with shared fixtures for all tests."""

import os
from collections.abc import Generator
from pathlib import Path

import pytest
from fastapi.testclient import TestClient
from hypothesis import HealthCheck, settings

# Set test environment variables before importing app
os.environ["SIG_ENVIRONMENT"] = "development"
os.environ["SIG_LOG_LEVEL"] = "WARNING"

settings.register_profile(
    "sig",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("sig")

DATA = Path(__file__).parent / "data"


@pytest.fixture
def test_settings():
    """Fresh settings for each test."""
    from sig.config import get_settings

    get_settings.cache_clear()
    yield get_settings()
    get_settings.cache_clear()


@pytest.fixture
def client(test_settings) -> Generator[TestClient, None, None]:
    """Create a test client for the FastAPI app."""
    from sig.main import app

    with TestClient(app) as test_client:
        yield test_client


@pytest.fixture(scope="session")
def data_dir() -> Path:
    """Directory holding the worked-example game, model and observation files."""
    return DATA


def _load(game_file: str, model_file: str, observation_file: str):
    from sig.services.formats import load_game, load_model, load_observation
    from sig.services.game import validate_epistemic, validate_game, validate_observation

    game = validate_game(load_game(DATA / game_file))
    model = validate_epistemic(load_model(DATA / model_file), game)
    observation = validate_observation(load_observation(DATA / observation_file), game.signature)
    return game, model, observation


@pytest.fixture
def fixture_a():
    """Game A with a single world at s and the public observation model."""
    return _load("game_a.g", "init_a.m", "public.o")


@pytest.fixture
def fixture_a_blurred():
    """Game A where player 2 cannot tell a from b."""
    return _load("game_a.g", "init_a.m", "blur2.o")


@pytest.fixture
def fixture_b():
    """Game B (loops at t and t') where player 2 cannot tell a from b."""
    return _load("game_b.g", "init_b.m", "blur2.o")


@pytest.fixture
def fixture_c():
    """Game C with three initial worlds and the public observation model."""
    return _load("game_c.g", "init_c.m", "public.o")


@pytest.fixture
def fixture_a_shadowed():
    """Game A with a world named `wa` at t beside w at s, so `wa` also names a run world."""
    from sig.services.formats import parse_model
    from sig.services.game import validate_epistemic

    game, _, observation = _load("game_a.g", "init_a.m", "public.o")
    model = validate_epistemic(parse_model("model shadow over A\nworlds w:s wa:t\nend\n"), game)
    return game, model, observation
