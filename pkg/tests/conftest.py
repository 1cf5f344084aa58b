import pytest

# criterion id -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def record(ac: str, ok: bool, detail: str) -> bool:
    ACCEPTANCE[ac] = (ok, detail)
    print(f"{ac} {'PASS' if ok else 'FAIL'}: {detail}")
    return ok


@pytest.fixture(scope="session")
def family_q5_g4():
    from negmoments.lfunction import family_coeffs

    return family_coeffs(5, 4, threads=8)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for ac in sorted(ACCEPTANCE, key=lambda s: int(s[2:])):
        ok, detail = ACCEPTANCE[ac]
        terminalreporter.write_line(f"{ac} {'PASS' if ok else 'FAIL'}: {detail}")
