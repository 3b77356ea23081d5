import re
from collections import OrderedDict

_RESULTS = OrderedDict()

CRITERIA = {
    1: "solution tables",
    2: "lifted indices and ceiling levels",
    3: "nu_3, nu_5, nu_7 scans",
    4: "nu_11 / nu_13 lists",
    5: "nu_2 box search",
    6: "p - 1 lifted solutions",
    7: "bound constants",
    8: "Petho dominance",
    9: "nu_p(C_n - t) desk check",
    10: "Woodall slice",
    11: "closed form vs recurrence",
}


def pytest_runtest_logreport(report):
    match = re.search(r"test_acceptance\.py::test_ac(\d+)_(\w+)(\[.*\])?", report.nodeid)
    if not match:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        ac = int(match.group(1))
        name = match.group(2) + (match.group(3) or "")
        if hasattr(report, "wasxfail"):
            outcome = "failed (expected)" if report.skipped else "passed unexpectedly"
        else:
            outcome = report.outcome
        _RESULTS.setdefault(ac, []).append((name, outcome))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for ac in sorted(_RESULTS):
        parts = _RESULTS[ac]
        ok = all(outcome == "passed" for _, outcome in parts)
        bad = [f"{name}: {outcome}" for name, outcome in parts if outcome != "passed"]
        line = f"AC{ac:<3} {'PASS' if ok else 'FAIL'}  {CRITERIA.get(ac, '')}"
        if bad:
            line += "  (" + "; ".join(bad) + ")"
        terminalreporter.write_line(line)
