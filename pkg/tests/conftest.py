import numpy as np
import pytest

from app.core.config import settings
from app.models.field import FieldSpec, get_field


@pytest.fixture
def gf2() -> FieldSpec:
    return get_field(2)


@pytest.fixture
def gf4() -> FieldSpec:
    return get_field(2, 2)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def budgets(monkeypatch):
    """Patch desk-scale budgets on the shared settings object for one test."""

    def apply(**values):
        for name, value in values.items():
            monkeypatch.setattr(settings, name, value)

    return apply
