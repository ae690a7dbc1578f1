import random

import pytest
from hypothesis import settings

from epwgm.fields import QQ, GF

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

FIELDS = [QQ, GF(7), GF(31)]
FIELD_IDS = ["Q", "F7", "F31"]


@pytest.fixture(params=FIELDS, ids=FIELD_IDS)
def field(request):
    return request.param


def rand_vec(rng: random.Random, field, n, box=4):
    from epwgm.fields import PrimeField
    if isinstance(field, PrimeField):
        return [rng.randrange(field.p) for _ in range(n)]
    return [field(rng.randint(-box, box)) for _ in range(n)]


def rand_invertible(rng, field, n):
    from epwgm.subspace import rank
    while True:
        M = [rand_vec(rng, field, n) for _ in range(n)]
        if rank(M, field) == n:
            return M


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
