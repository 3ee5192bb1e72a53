CRITERION_LINES: list[str] = []


def record_criterion(line: str) -> None:
    CRITERION_LINES.append(line)
    print(line, flush=True)


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
