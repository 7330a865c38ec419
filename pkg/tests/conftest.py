import pathlib
import re
import sys

sys.path.insert(0, str(pathlib.Path(__file__).parent))

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter):
    rows = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            m = _CRITERION.search(getattr(rep, "nodeid", ""))
            if m and (rep.when == "call" or outcome == "error"):
                rows[int(m.group(1))] = (m.group(2).replace("_", " "), "PASS" if outcome == "passed" else "FAIL")
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(rows):
        name, verdict = rows[n]
        terminalreporter.write_line(f"criterion {n}: {verdict}  ({name})")
