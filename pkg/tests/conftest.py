import pytest

from pcapstego import CoverParams, generate_cover


@pytest.fixture(scope="session")
def small_cover():
    return generate_cover(CoverParams(seed=11, n_polls=50))


@pytest.fixture(scope="session")
def medium_cover():
    return generate_cover(CoverParams(seed=23, n_polls=500))
