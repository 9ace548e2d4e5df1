import pytest

from xpathhw.datapath import DatapathConfig, lower_to_datapath
from xpathhw.profile import parse_profiles
from xpathhw.regex import build_prefix_forest, lower_profile


def compile_profiles(raws, config=DatapathConfig(), dictionary=None):
    asts = parse_profiles(list(raws), dictionary)
    forest = build_prefix_forest(lower_profile(a) for a in asts)
    return lower_to_datapath(forest, config)


@pytest.fixture
def compile_dp():
    return compile_profiles


_ACCEPTANCE: list[str] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number: int, title: str, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number} ({title}): {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split("criterion ")[1].split()[0])):
            terminalreporter.write_line(line)
