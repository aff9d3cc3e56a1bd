import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("deterministic", derandomize=True, deadline=None, max_examples=60, print_blob=True)
settings.load_profile("deterministic")


@pytest.fixture(scope="session")
def gp_problem_inconsistent():
    from singular_gmres import RhsMode, make_problem

    return make_problem("gp", rhs=RhsMode.inconsistent())


@pytest.fixture(scope="session")
def gp_problem_consistent():
    from singular_gmres import RhsMode, make_problem

    return make_problem("gp", rhs=RhsMode.consistent())


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    report = getattr(mod, "REPORT", None)
    if report:
        terminalreporter.section("acceptance criteria")
        for number in sorted(report):
            terminalreporter.write_line(report[number])
