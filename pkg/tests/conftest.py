import numpy as np
import pytest
from hypothesis import strategies as st

from xstates.orbits import compose_rows
from xstates.state import from_row


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def _simplex_point(w):
    w = np.asarray(w, dtype=float) + 1e-3
    r = w / w.sum()
    r[:2] = np.sort(r[:2])[::-1]
    r[2:] = np.sort(r[2:])[::-1]
    return r


unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
spectra = st.lists(unit, min_size=4, max_size=4).map(_simplex_point)
polar = st.floats(min_value=0.0, max_value=np.pi, allow_nan=False)
azimuth = st.floats(min_value=0.0, max_value=2 * np.pi, exclude_max=True, allow_nan=False)


@st.composite
def xstates(draw):
    """Valid X-states built from a spectrum and chart angles."""
    r = draw(spectra)
    angles = [draw(polar), draw(azimuth), draw(polar), draw(azimuth)]
    row = compose_rows(r[None, :], np.array([angles]))[0]
    row[:4] /= row[:4].sum()
    return from_row(row)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
