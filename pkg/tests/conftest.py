import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ampprep.oracle import make_table

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

ACCEPTANCE_RESULTS = {}


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


@st.composite
def tables(draw, max_n=4, max_m=5, min_n=1):
    n = draw(st.integers(min_n, max_n))
    m = draw(st.integers(2, max_m))
    limit = (1 << (m - 1)) - 1
    values = draw(st.lists(st.integers(-limit, limit), min_size=1 << n, max_size=1 << n)
                  .filter(any))
    return make_table(n, m, values)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: (int(k.split()[0].rstrip("ab")), k)):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}")
