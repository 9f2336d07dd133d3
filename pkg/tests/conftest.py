import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)$")
_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: acceptance criterion checks")


def pytest_runtest_logreport(report):
    match = _CRITERION.search(report.nodeid)
    if not match:
        return
    key = (int(match.group(1)), match.group(2).replace("_", " "))
    status, props = _RESULTS.get(key, ("PASS", {}))
    if report.failed or (report.when == "call" and report.skipped):
        status = "FAIL"
    if report.when == "call":
        props = dict(report.user_properties)
    _RESULTS[key] = (status, props)


def _fmt(value):
    return f"{value:.3g}" if isinstance(value, float) else str(value)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for (number, name), (status, props) in sorted(_RESULTS.items()):
        details = ", ".join(f"{k}={_fmt(v)}" for k, v in props.items())
        terminalreporter.write_line(f"criterion {number:2d} {status}: {name}  [{details}]")
