import pytest

from weilval.finite_field import FieldSpec, build_field


@pytest.fixture(scope="session")
def field_cache():
    cache = {}

    def get(p, n):
        if (p, n) not in cache:
            cache[p, n] = build_field(FieldSpec(p, n))
        return cache[p, n]

    return get


_ACCEPTANCE: list[str] = []


@pytest.fixture(scope="session")
def acceptance():
    def report(label: str, ok: bool, detail: str = "") -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {label}" + (f": {detail}" if detail else "")
        _ACCEPTANCE.append(line)
        print(line)
        return ok
    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
