import random
from fractions import Fraction

import pytest
from hypothesis import settings

from quadapprox.forms import QuadraticForm
from quadapprox.zeros import lift_isotropy

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ISOTROPIC_FORMS = {
    "I2": [[1, 0], [0, 1]],
    "diag12": [[1, 0], [0, 2]],
    "I3": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    "diag112": [[1, 0, 0], [0, 1, 0], [0, 0, 2]],
}


def random_quadric_point(form: QuadraticForm, rng: random.Random, size: int = 6) -> list[Fraction]:
    """Project a random direction through a known zero of the lift onto the quadric.

    For a zero ``z0`` of ``F`` and any ``d`` with ``F(d) != 0`` the vector
    ``F(d) z0 - 2 B(z0, d) d`` is again a zero.
    """
    lift = form.lift()
    z0 = list(lift_isotropy(form.gram).zero.vector)
    while True:
        d = [rng.randint(-size, size) for _ in range(form.n + 1)]
        fd = lift(d)
        if fd == 0:
            continue
        b = lift.bilinear(z0, d)
        z = [fd * x - 2 * b * y for x, y in zip(z0, d)]
        if z[-1] != 0:
            return [Fraction(x, z[-1]) for x in z[:-1]]


@pytest.fixture
def rng():
    return random.Random(20240611)


# one PASS/FAIL line per acceptance criterion in the terminal summary
_CRITERIA: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        detail = dict(report.user_properties).get("detail", "")
        _CRITERIA[name] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda s: int(s.split("_")[2])):
        status, detail = _CRITERIA[name]
        num, _, title = name[len("test_criterion_"):].partition("_")
        terminalreporter.write_line(f"{status}  criterion {num} ({title.replace('_', ' ')})  {detail}".rstrip())
