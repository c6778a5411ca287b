"""Shared fixtures: machines from tests/fixtures and a fresh monoid cache per test."""
import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from app.config import get_settings
from app.services.cache import clear_caches
from app.services.converter import MachineConverter

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile(
    "ci",
    max_examples=200,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("dev", max_examples=30, deadline=None)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "ci"))


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.txt"


def load_fixture(name: str):
    return MachineConverter.parse_file(fixture_path(name))


@pytest.fixture(autouse=True)
def fresh_cache():
    clear_caches()
    yield
    clear_caches()


@pytest.fixture
def load():
    return load_fixture


@pytest.fixture
def f_ends():
    return load_fixture("f_ends")


@pytest.fixture
def f_even():
    return load_fixture("f_even")


@pytest.fixture
def identity():
    return load_fixture("identity")


@pytest.fixture
def l_ends():
    return load_fixture("l_ends")


@pytest.fixture
def xmp_bim():
    return load_fixture("xmp_bim")


@pytest.fixture
def f_ends_translation():
    return load_fixture("f_ends_translation")


@pytest.fixture
def configure(monkeypatch):
    """Set ``RATFUN_*`` variables for one test and reload the settings."""

    def apply(**values):
        for key, value in values.items():
            monkeypatch.setenv(f"RATFUN_{key.upper()}", str(value))
        get_settings.cache_clear()

    get_settings.cache_clear()
    yield apply
    get_settings.cache_clear()
