import numpy as np
import pytest
from hypothesis import strategies as st

from dghomog.panel import Panel, SupportSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@st.composite
def panels(draw, max_n=5, max_T=6, max_states=4, max_actions=4):
    n = draw(st.integers(1, max_n))
    T = draw(st.integers(2, max_T))
    m = draw(st.integers(1, max_states))
    k = draw(st.integers(1, max_actions))
    cells = st.lists(st.integers(1, m), min_size=n * T, max_size=n * T)
    acts = st.lists(st.integers(1, k), min_size=n * T, max_size=n * T)
    S = np.array(draw(cells)).reshape(n, T)
    A = np.array(draw(acts)).reshape(n, T)
    return Panel(S, A, SupportSpec(m, k))


def random_panel(rng, n, T, m, k):
    return Panel(rng.integers(1, m + 1, (n, T)), rng.integers(1, k + 1, (n, T)), SupportSpec(m, k))


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
