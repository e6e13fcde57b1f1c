import pytest

from edgeqet import params as P


@pytest.fixture(scope="session")
def params():
    """The quoted-experiment defaults used throughout the suite."""
    return P.default_paper_params()
