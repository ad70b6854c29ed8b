import pytest

from wtdecode.probsource import garden_table, nonmono_table, theorem1_table
from wtdecode.vocab import Vocabulary


@pytest.fixture
def garden():
    return garden_table()


@pytest.fixture
def theorem1():
    return theorem1_table()


@pytest.fixture
def nonmono():
    return nonmono_table()


@pytest.fixture
def abx_vocab():
    return Vocabulary(["▁a", "▁b", "x"])
