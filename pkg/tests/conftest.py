import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).parent
FIXTURES = TESTS.parent / 'fixtures' / 'corpus'
sys.path.insert(0, str(TESTS))

# criterion number -> (title, [outcome, ...])
_criteria: dict[int, tuple[str, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line(
        'markers', 'criterion(number, title): acceptance criterion covered')


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker('criterion')
        if mark is not None:
            number, title = mark.args
            _criteria.setdefault(number, (title, []))
            item.user_properties.append(('criterion', number))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if 'criterion' not in props:
        return
    if report.when == 'call' or report.outcome != 'passed':
        _criteria[props['criterion']][1].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section('acceptance criteria')
    for number in sorted(_criteria):
        title, outcomes = _criteria[number]
        ok = bool(outcomes) and all(o == 'passed' for o in outcomes)
        terminalreporter.write_line('AC%-2d %s  %s' % (
            number, 'PASS' if ok else 'FAIL', title))


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def manifest():
    return FIXTURES / 'manifest.fuse'
