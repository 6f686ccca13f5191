import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# Master seed for every stochastic acceptance check, fixed before any run.
ACCEPTANCE_SEED = 20261014

_RESULTS: dict[int, list[tuple[str, bool, str]]] = {}


class CriterionLog:
    def __init__(self, number: int, name: str):
        self.number = number
        self.name = name

    def record(self, ok: bool, detail: str = "") -> None:
        _RESULTS.setdefault(self.number, []).append((self.name, bool(ok), detail))
        print(f"criterion {self.number} [{self.name}]: {'PASS' if ok else 'FAIL'} {detail}")


@pytest.fixture
def criterion():
    return CriterionLog


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        parts = _RESULTS[number]
        ok = all(p[1] for p in parts)
        detail = "; ".join(f"{name}: {'ok' if good else 'FAILED'} {d}".rstrip() for name, good, d in parts)
        terminalreporter.write_line(f"CRITERION {number}: {'PASS' if ok else 'FAIL'} ({detail})")
