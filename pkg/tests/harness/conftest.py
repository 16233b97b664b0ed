"""A config small enough to run every sweep in seconds."""

import pytest

from tests.helpers import tiny_config as make_tiny_config


@pytest.fixture
def tiny_config():
    return make_tiny_config()
