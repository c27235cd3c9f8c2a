from pathlib import Path

import pytest

from config import get_settings
from spaces import moore, sphere, wedge_of_circles

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def fixture_dir() -> Path:
    return FIXTURES


@pytest.fixture
def fixture_spaces():
    return {
        "S1": sphere(1),
        "S2": sphere(2),
        "wedge2": wedge_of_circles(2),
        "M2_2": moore(2, 2),
    }
