import json

import pytest

from gwvuln.synthetic import SyntheticScenario, generate


def write_scenario(path, **overrides):
    scenario = SyntheticScenario(**{"ncols": 40, "nrows": 40, "cellsize": 250.0, **overrides})
    data = generate(scenario)
    data.write(path)
    return path / "config.json", data


@pytest.fixture(scope="session")
def small_scenario(tmp_path_factory):
    """Read-only 40x40 synthetic scenario shared across tests."""
    return write_scenario(tmp_path_factory.mktemp("scenario"))


@pytest.fixture
def scenario_copy(tmp_path):
    """Private scenario directory that a test may modify."""
    cfg, data = write_scenario(tmp_path)
    return cfg, json.loads(cfg.read_text()), data


# -- acceptance reporting --------------------------------------------------------

_ACCEPTANCE: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    number, title = mark.args
    entry = _ACCEPTANCE.setdefault(number, {"title": title, "ok": True, "n": 0})
    if rep.when == "call":
        entry["n"] += 1
    if rep.failed:
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        e = _ACCEPTANCE[number]
        status = "PASS" if e["ok"] and e["n"] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {e['title']}")
