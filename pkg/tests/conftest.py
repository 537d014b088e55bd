import sys
from pathlib import Path

import pytest
from hypothesis import settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from qubitnd import qmodel as qm  # noqa: E402
from qubitnd.sampling import SamplerConfig, random_mixed_povm, random_povm  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)
indices = st.integers(min_value=0, max_value=10_000)


@st.composite
def povms(draw, outcomes=None):
    """Random valid POVMs from the seeded samplers."""
    seed, index = draw(seeds), draw(indices)
    if outcomes is None:
        return random_mixed_povm(seed, index)
    profile = draw(st.sampled_from(["all_rank_one", "general"]))
    plane = draw(st.booleans())
    return random_povm(SamplerConfig(seed=seed, outcomes=outcomes, plane_xz=plane, rank_profile=profile), index)


@st.composite
def unit_vectors(draw):
    v = draw(st.lists(st.floats(-1, 1, allow_nan=False), min_size=3, max_size=3))
    if sum(t * t for t in v) < 1e-6:
        v = [0.0, 0.0, 1.0]
    return qm.unit(v)


@st.composite
def bloch_vectors(draw):
    u = draw(unit_vectors())
    return u * draw(st.floats(0, 1))


@pytest.fixture
def zx():
    return qm.pauli("z"), qm.pauli("x")


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
