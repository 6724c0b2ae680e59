import math

import numpy as np
import pytest

from srmetro import kernels

ACCEPTANCE_LINES = []


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def acceptance_log():
    def log(criterion, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'}  criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return log


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_state(rng, n_atoms):
    from srmetro import ExcitationState

    vec = rng.normal(size=2 * n_atoms) + 1j * rng.normal(size=2 * n_atoms)
    return ExcitationState.from_vector(vec / np.linalg.norm(vec))


LAMBDA1 = 1.0
K1 = 2 * math.pi / LAMBDA1
