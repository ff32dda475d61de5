import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from mpgrad.complex import SimplicialComplex
from mpgrad.filtrations import Filtration

from oracles import monotone_values

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def complexes(draw, max_vertices=6, max_dim=2, max_simplices=30):
    nv = draw(st.integers(1, max_vertices))
    tops = draw(st.lists(st.sets(st.integers(0, nv - 1), min_size=1, max_size=max_dim + 1), max_size=8))
    chosen = {(v,) for v in range(nv)}
    for top in tops:
        s = tuple(sorted(top))
        faces = {f for k in range(1, len(s) + 1) for f in itertools.combinations(s, k)}
        if len(chosen | faces) <= max_simplices:
            chosen |= faces
    simplices = sorted(chosen, key=lambda s: (len(s), s))
    return SimplicialComplex(range(nv), simplices)


@st.composite
def filtrations(draw, n=2, levels=4, **kw):
    K = draw(complexes(**kw))
    raw = draw(st.lists(st.integers(0, levels - 1), min_size=len(K) * n, max_size=len(K) * n))
    values = monotone_values(K.simplices, np.array(raw, dtype=float).reshape(len(K), n))
    return Filtration(K, values)


# acceptance reporting

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): headline acceptance criterion")


def pytest_runtest_logreport(report):
    item_marks = getattr(report, "_acceptance", None)
    if item_marks is None:
        return
    number, title = item_marks
    prev = _RESULTS.get(number, (title, True))
    ok = prev[1] and not report.failed
    if report.when == "call" or report.failed:
        _RESULTS[number] = (title, ok)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is not None:
        report._acceptance = tuple(mark.args)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, ok = _RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")
