import math
import random

import pytest

from lisna.graph import Edge, SpatialNetwork, Vertex


def make_net(edges, coords=None, lengths=None):
    """Network from ``(tail, head, directed)`` triples; edge ids are 1-based positions.

    Vertices default to points on a unit-ish circle so Euclidean lengths are positive.
    """
    ids = sorted({v for t, h, _ in edges for v in (t, h)} | set(coords or {}))
    if coords is None:
        coords = {v: (10 * math.cos(2 * math.pi * i / len(ids)),
                      10 * math.sin(2 * math.pi * i / len(ids))) for i, v in enumerate(ids)}
    verts = [Vertex(v, *coords[v]) for v in ids]
    lengths = lengths or {}
    es = [Edge(i, t, h, d, lengths.get(i)) for i, (t, h, d) in enumerate(edges, start=1)]
    return SpatialNetwork(verts, es)


def random_mixed_net(rng: random.Random, max_vertices=10, p_edge=0.35, p_directed=0.5,
                     isolated_ok=True):
    n = rng.randint(2, max_vertices)
    coords = {v: (rng.uniform(0, 100), rng.uniform(0, 100)) for v in range(n)}
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < p_edge:
                directed = rng.random() < p_directed
                t, h = (a, b) if rng.random() < 0.5 else (b, a)
                edges.append((t, h, directed))
    lengths = {i: rng.uniform(0.5, 5.0) for i in range(1, len(edges) + 1)}
    return make_net(edges, coords, lengths)


@pytest.fixture
def path3():
    # 1 - 2 - 3
    return make_net([(1, 2, False), (2, 3, False)])


@pytest.fixture
def cycle4():
    # 1 - 2 - 3 - 4 - 1, edge ids 1..4
    return make_net([(1, 2, False), (2, 3, False), (3, 4, False), (4, 1, False)])


def mixed_net():
    """Partially directed fixture covering every incidence class.

        1 -> 2 -> 3 -> 4 -> 5          arcs e1..e4
        2 -- 6, 6 -- 7, 7 -- 3         lines e5..e7
        8 -> 3, 4 -> 9, 9 -- 10        e8 arc, e9 arc, e10 line
        6 -- 11, 11 -> 12              e11 line, e12 arc
    """
    return make_net([
        (1, 2, True), (2, 3, True), (3, 4, True), (4, 5, True),
        (2, 6, False), (6, 7, False), (7, 3, False),
        (8, 3, True), (4, 9, True), (9, 10, False),
        (6, 11, False), (11, 12, True),
    ])


@pytest.fixture
def mixed():
    return mixed_net()


# -- acceptance report ----------------------------------------------------------

_criteria: dict[int, bool] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion covered by the test")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    ok = report.passed or (report.when != "call" and not report.failed)
    _criteria[marker] = _criteria.get(marker, True) and ok


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        outcome.get_result().criterion = mark.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        terminalreporter.write_line(
            f"ACCEPTANCE criterion {n}: {'PASS' if _criteria[n] else 'FAIL'}")
