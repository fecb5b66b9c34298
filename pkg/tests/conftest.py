import numpy as np
import pytest

from polarkit import BitMatrix, make_bec, make_bsc, random_symmetric_channel

G2 = BitMatrix.from_rows(["10", "11"])
G3 = BitMatrix.from_rows(["100", "110", "101"])


@pytest.fixture
def g2():
    return G2


@pytest.fixture
def g3():
    return G3


def channel_corpus():
    chans = [("bec0.3", make_bec(0.3)), ("bsc0.11", make_bsc(0.11))]
    for s in range(5):
        chans.append((f"mix{s}", random_symmetric_channel(100 + s, 1 + s % 3)))
    return chans


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
