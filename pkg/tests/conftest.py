import pytest

# criterion number -> list of (passed, detail), filled by test_acceptance.py
ACCEPTANCE = {}

TITLES = {
    1: "oracle vs Monte Carlo pmf",
    2: "exact path identities",
    3: "variant equivalence",
    4: "escape rate at desk scale",
    5: "moment-decay exponents",
    6: "return probability bound",
    7: "fluctuation limit law",
    8: "urn proportion decay",
    9: "determinism",
}


@pytest.fixture
def record():
    def _record(criterion, passed, detail):
        ACCEPTANCE.setdefault(criterion, []).append((bool(passed), detail))
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        entries = ACCEPTANCE[k]
        ok = all(p for p, _ in entries)
        tr.write_line(f"criterion {k} ({TITLES.get(k, '')}): {'PASS' if ok else 'FAIL'}")
        for p, detail in entries:
            tr.write_line(f"    {'ok  ' if p else 'FAIL'} {detail}")
