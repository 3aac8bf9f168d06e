import contextlib

# criterion number -> (passed, one-line detail); filled by test_acceptance.py
ACCEPTANCE = {}


@contextlib.contextmanager
def criterion(number, title):
    """Record the outcome of one acceptance criterion and print it."""
    detail = {"text": ""}
    try:
        yield detail
    except BaseException as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        ACCEPTANCE[number] = (False, f"{title}: {msg}")
        print(f"FAIL criterion {number}: {title}: {msg}")
        raise
    ACCEPTANCE[number] = (True, f"{title}: {detail['text']}")
    print(f"PASS criterion {number}: {title}: {detail['text']}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number}: {text}")
