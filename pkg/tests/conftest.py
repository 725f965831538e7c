import pathlib

import pytest

import quanta as q
from quanta.normalizer import EffectChannel

CORPUS = pathlib.Path(__file__).parent / "corpus"


def corpus_files():
    return sorted(CORPUS.glob("*.qta"))


def run(src, ctx=None, **kw):
    """Normalize ``src`` with console output captured."""
    kw.setdefault("effects", EffectChannel(None))
    return q.normalize(ctx if ctx is not None else q.create_context(), q.parse_program(src), **kw)


def nf(src, ctx=None, **kw) -> str:
    return q.to_source(run(src, ctx, **kw).value)


@pytest.fixture
def world():
    return q.create_context()


# ------------------------------------------------ acceptance criteria summary

_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion a test belongs to")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            item.user_properties.append(("criterion", m.args[0]))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    crit = props.get("criterion")
    if crit is None or (report.when != "call" and report.passed):
        return
    ok = report.passed and not hasattr(report, "wasxfail")
    notes = _criteria.setdefault(crit, [])
    if not ok:
        notes.append(getattr(report, "wasxfail", "") or report.nodeid.split("::")[-1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_criteria, key=lambda c: int(c.split()[0])):
        notes = _criteria[crit]
        line = "%-4s %s" % ("FAIL" if notes else "PASS", crit)
        if notes:
            line += " (%s)" % "; ".join(notes)
        terminalreporter.write_line(line)
