import random

import pytest

from cyclo.cyclotomic import CycloCache


@pytest.fixture
def cache():
    return CycloCache()


@pytest.fixture
def rng():
    return random.Random(20240601)


_ACCEPTANCE: dict[str, str] = {}


@pytest.fixture
def verdict(request):
    """Record an acceptance criterion's outcome; printed in the terminal summary."""
    name = request.node.name.removeprefix("test_").split("_", 1)[0].upper()

    def record(ok: bool, detail: str) -> bool:
        _ACCEPTANCE[name] = f"{name:<5} {'PASS' if ok else 'FAIL'}  {detail}"
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: int(k[2:])):
        terminalreporter.write_line(_ACCEPTANCE[key])
