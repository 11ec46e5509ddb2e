from pathlib import Path

import pytest

from ontorules import DataSet, parse_ontology

DATA = Path(__file__).parent / "data"

TABLE_II = [
    ("House", "Door", "liveIn", "partOf"),
    ("House", "Door", "builds", "partOf"),
    ("House", "Door", "liveIn", "equivalentOf"),
    ("House", "Door", "builds", "equivalentOf"),
    ("House", "Window", "liveIn", "partOf"),
    ("House", "Window", "builds", "partOf"),
    ("House", "Window", "liveIn", "equivalentOf"),
    ("House", "Window", "builds", "equivalentOf"),
]

MU = {"House": 1.0, "Door": 0.95, "Window": 0.9, "liveIn": 0.7, "builds": 0.8,
      "partOf": 0.85, "equivalentOf": 0.65}


@pytest.fixture
def house_ttl():
    return (DATA / "house.ttl").read_text(encoding="utf-8")


@pytest.fixture
def house_fuzzy_ttl():
    return (DATA / "house_fuzzy.ttl").read_text(encoding="utf-8")


@pytest.fixture
def house_graph(house_ttl):
    return parse_ontology(house_ttl, "turtle", source_id="house.ttl")


@pytest.fixture
def fuzzy_graph(house_fuzzy_ttl):
    return parse_ontology(house_fuzzy_ttl, "turtle", source_id="house_fuzzy.ttl")


@pytest.fixture
def table2():
    return DataSet.from_values(TABLE_II)


@pytest.fixture
def table3():
    return DataSet.from_values(TABLE_II, [tuple(MU[v] for v in row) for row in TABLE_II])


def perfect_rows():
    """12 rows where Outgoing=partOf exactly when Incoming=liveIn."""
    rows = []
    for cls in ("House", "Barn"):
        for prop in ("Door", "Window", "Roof"):
            for inc, out in (("liveIn", "partOf"), ("builds", "equivalentOf")):
                rows.append((cls, prop, inc, out))
    return rows


@pytest.fixture
def perfect():
    return DataSet.from_values(perfect_rows())


# -- acceptance reporting -------------------------------------------------

_criteria = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call" and not (call.when == "setup" and call.excinfo):
        return
    number, title = marker.args
    ok = call.excinfo is None
    prev = _criteria.get(number, (title, True))
    _criteria[number] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
