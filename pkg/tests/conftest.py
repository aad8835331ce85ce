import pytest

from cden import engine
from cden.datasets import write_pattern_corpus

_CRITERIA = {}


@pytest.fixture(scope="session")
def pattern_corpus(tmp_path_factory):
    """Four categories x ten PNGs plus labels.csv; returns ``(directory, labels_path)``."""
    directory = tmp_path_factory.mktemp("patterns")
    return directory, write_pattern_corpus(directory)


@pytest.fixture(scope="session")
def pattern_labels(pattern_corpus):
    return engine.read_labels(pattern_corpus[1])


@pytest.fixture(scope="session")
def dcden_index(pattern_corpus):
    return engine.build_index(pattern_corpus[0], "dcden")


@pytest.fixture(scope="session")
def icde_index(pattern_corpus):
    return engine.build_index(pattern_corpus[0], "icde")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[marker] = report.outcome


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), outcome in sorted(_CRITERIA.items()):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[outcome]
        terminalreporter.write_line(f"AC{number:<2} {status}  {title}")
