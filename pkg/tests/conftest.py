import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance

    if test_acceptance.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.REPORT:
            terminalreporter.write_line(line)
