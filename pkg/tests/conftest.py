"""Prints one PASS/FAIL line per acceptance criterion at the end of the run."""

from collections import OrderedDict

_results: "OrderedDict[str, list]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label, title): acceptance criterion covered by the test")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            label, title = mark.args
            _results.setdefault(label, [title, []])


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when != "call":
        return
    label = mark.args[0]
    passed = call.excinfo is None
    note = "; ".join(f"{k}={v}" for k, v in item.user_properties)
    _results[label][1].append((item.name, passed, note))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for label, (title, runs) in _results.items():
        if not runs:
            tr.write_line(f"criterion {label}: NOT RUN  {title}")
            continue
        ok = all(p for _, p, _ in runs)
        tr.write_line(f"criterion {label}: {'PASS' if ok else 'FAIL'}  {title}")
        for name, p, note in runs:
            if len(runs) > 1 or note:
                tr.write_line(f"    {'pass' if p else 'FAIL'}  {name}  {note}")
