import numpy as np
import pytest
from hypothesis import settings, strategies as st

from minionlab.boolfn import BooleanFunction

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

BIASES = (0.1, 1 / 3, 0.5, 0.9)


@st.composite
def boolean_functions(draw, min_arity=0, max_arity=6):
    n = draw(st.integers(min_arity, max_arity))
    bits = draw(st.lists(st.integers(0, 1), min_size=1 << n, max_size=1 << n))
    return BooleanFunction(n, bits)


@st.composite
def monotone_functions(draw, min_arity=1, max_arity=5):
    """Upward closure of a random family of generators."""
    n = draw(st.integers(min_arity, max_arity))
    gens = draw(st.lists(st.integers(0, (1 << n) - 1), max_size=4))
    idx = np.arange(1 << n)
    t = np.zeros(1 << n, dtype=np.uint8)
    for g in gens:
        t |= ((idx & g) == g).astype(np.uint8)
    return BooleanFunction(n, t)


biases = st.floats(0.05, 0.95)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
