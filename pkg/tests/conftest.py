import numpy as np
from hypothesis import settings, strategies as st
from hypothesis.extra.numpy import arrays

from sortition.profiles import PreferenceProfile

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@st.composite
def profiles(draw, max_n=8, max_m=6, min_n=1):
    n = draw(st.integers(min_n, max_n))
    m = draw(st.integers(1, max_m))
    bits = draw(arrays(np.uint8, (n, m), elements=st.integers(0, 1)))
    return PreferenceProfile(bits)


def random_profile(rng, n, m):
    return PreferenceProfile(rng.integers(0, 2, size=(n, m)))


# one line per acceptance criterion, printed after the run even when output is captured
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[0][2:])):
            terminalreporter.write_line(line)
