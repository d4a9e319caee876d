import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp


def random_pd(p, rng, floor=0.2):
    a = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
    return a @ a.conj().T / p + floor * np.eye(p)


@st.composite
def pd_matrices(draw, min_p=2, max_p=6):
    """Complex Hermitian PD matrices with a bounded condition number."""
    p = draw(st.integers(min_p, max_p))
    elems = st.floats(-2, 2, allow_nan=False, allow_infinity=False)
    re = draw(hnp.arrays(float, (p, p), elements=elems))
    im = draw(hnp.arrays(float, (p, p), elements=elems))
    a = re + 1j * im
    return a @ a.conj().T / p + 0.25 * np.eye(p)


@pytest.fixture
def rng():
    return np.random.default_rng(20240617)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES = {}


def record_acceptance(number, ok, detail, seconds):
    status = "PASS" if ok else "FAIL"
    ACCEPTANCE_LINES[number] = f"criterion {number}: {status} ({seconds:.1f} s) {detail}"
    print(ACCEPTANCE_LINES[number])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
