import numpy as np
import pytest

from blochsep import states

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def singlet():
    return states.bell_diagonal([1, 0, 0, 0])


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def shrunk_form(condition, M, N, seed):
    """Random Bloch form scaled so ``condition`` holds with a random margin.

    The prop3, theorem2 and remark2 statistics are all linear in the
    scaling factor, so one rescale lands inside the condition.
    """
    from blochsep import criteria
    from blochsep.bloch import to_bloch

    rng = np.random.default_rng(seed)
    rank = int(rng.integers(1, M * N + 1))
    b = to_bloch(states.random_state(M, N, rng, rank=rank))
    test = {"prop3": criteria.prop3, "theorem2": criteria.theorem2, "remark2": criteria.remark2}[condition]
    res = test(b)
    return b.scaled(rng.uniform(0.3, 1.0) * res.threshold / res.statistic)
