_ACCEPTANCE: list[tuple[str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: exit criteria of the project")


def pytest_runtest_makereport(item, call):
    if call.when != "call" or item.get_closest_marker("acceptance") is None:
        return
    doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
    _ACCEPTANCE.append((doc, "PASS" if call.excinfo is None else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _ACCEPTANCE:
        terminalreporter.write_line(f"{status}  {name}")
