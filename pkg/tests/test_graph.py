import random

import pytest
from hypothesis import given, settings, strategies as st

from lisna.graph import (Edge, NetworkError, NoPathError, SpatialNetwork, Traversal, Vertex,
                         ancestors_edge_set, descendants_edge_set)

from conftest import make_net, random_mixed_net
from oracles import INF, all_simple_paths, floyd_warshall, incidence_sets


def test_neighbors_path(path3):
    assert path3.neighbors(2) == {1, 3}
    assert path3.kind == "undirected"


def test_isolated_vertex_has_no_neighbors():
    net = SpatialNetwork([Vertex(1, 0, 0), Vertex(2, 1, 0), Vertex(3, 5, 5)],
                         [Edge(1, 1, 2, False, None)])
    assert net.neighbors(3) == set()
    assert net.degree(3) == 0
    assert net.cg_degree(3) == 0


def test_neighbors_excludes_arc_partners():
    net = make_net([(1, 2, False), (3, 2, True)])
    assert net.neighbors(2) == {1}
    assert net.kind == "partially directed"


def test_unknown_vertex_is_lookup_error(path3):
    with pytest.raises(KeyError):
        path3.neighbors(99)
    with pytest.raises(KeyError):
        path3.hop_distance(1, 99)


def test_parents_children_family():
    net = make_net([(1, 2, True), (3, 2, True), (2, 4, True)])
    assert net.parents(2) == {1, 3}
    assert net.children(2) == {4}
    assert net.family(2) == {1, 3, 4}
    assert net.kind == "directed"


def test_undirected_graph_has_no_parents(cycle4):
    assert all(cycle4.parents(v) == set() for v in cycle4.vertex_ids)


@pytest.mark.parametrize("edges", [
    [(1, 2, True), (1, 2, False)],
    [(1, 2, True), (2, 1, True)],
    [(1, 2, False), (2, 1, False)],
])
def test_second_edge_between_pair_rejected(edges):
    with pytest.raises(NetworkError, match="duplicates vertex pair"):
        make_net(edges)


def test_self_loop_and_dangling_rejected():
    with pytest.raises(NetworkError, match="self-loop"):
        SpatialNetwork([Vertex(1, 0, 0)], [Edge(1, 1, 1, False, 1.0)])
    with pytest.raises(NetworkError, match="unknown vertex"):
        SpatialNetwork([Vertex(1, 0, 0)], [Edge(1, 1, 2, False, 1.0)])


def test_star_degrees():
    net = make_net([(0, k, False) for k in range(1, 5)])
    assert net.degree(0) == 4
    assert net.cg_degree(0) == 4


def test_mixed_degrees():
    net = make_net([(1, 0, True), (2, 0, True), (0, 3, True), (0, 4, False)])
    assert (net.in_degree(0), net.out_degree(0), net.degree(0), net.cg_degree(0)) == (2, 1, 1, 4)


def test_default_length_is_euclidean():
    net = SpatialNetwork([Vertex(1, 0, 0), Vertex(2, 3, 4)], [Edge(7, 1, 2, False, None)])
    assert net.edge(7).length == 5.0


def test_hop_distance_examples(path3, cycle4):
    assert path3.hop_distance(1, 3) == 2
    assert path3.hop_distance(2, 2) == 0
    assert cycle4.hop_distance(1, 3) == 2
    arc = make_net([(1, 2, True)])
    assert arc.hop_distance(2, 1, Traversal.DIRECTED) is None
    assert arc.hop_distance(2, 1, Traversal.UNDIRECTED) == 1


def test_shortest_path_tie_break(cycle4):
    p = cycle4.shortest_path(1, 3)
    assert p.vertices == (1, 2, 3)
    assert p.edges == (1, 2)
    assert not p.directed


def test_shortest_path_against_arc():
    net = make_net([(1, 2, True), (2, 3, True)])
    assert net.shortest_path(1, 3, "direction-preserving").directed
    with pytest.raises(NoPathError):
        net.shortest_path(3, 1, Traversal.DIRECTED)


def test_cross_component_is_unreachable():
    net = make_net([(1, 2, False), (3, 4, False)])
    assert net.hop_distance(1, 4) is None


def test_ancestors_descendants():
    net = make_net([(1, 2, True), (2, 3, True)])
    p = net.path([1, 2, 3])
    assert ancestors_edge_set(p) == {1}
    assert descendants_edge_set(p) == {2}
    single = net.path([1, 2])
    assert ancestors_edge_set(single) == set()
    assert descendants_edge_set(single) == set()


def test_ancestors_require_directed_path(path3):
    with pytest.raises(NetworkError):
        ancestors_edge_set(path3.path([1, 2, 3]))


def test_head_to_head_is_not_direction_preserving():
    net = make_net([(1, 2, True), (3, 2, True)])
    assert not net.path([1, 2, 3]).directed


def test_reduced_sets_drop_exactly_one_end_edge():
    # exhaustive over every directed path of up to 4 edges on a directed chain with branches
    net = make_net([(1, 2, True), (2, 3, True), (3, 4, True), (4, 5, True), (2, 6, True),
                    (6, 4, True)])
    checked = 0
    for verts in all_simple_paths(net, 4):
        p = net.path(verts)
        if not p.directed:
            continue
        anc, desc = ancestors_edge_set(p), descendants_edge_set(p)
        assert p.edges[-1] not in anc and anc | {p.edges[-1]} == set(p.edges)
        assert p.edges[0] not in desc and desc | {p.edges[0]} == set(p.edges)
        assert len(anc) == len(desc) == len(p) - 1
        checked += 1
    assert checked >= 10


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_structure_matches_brute_force(seed):
    net = random_mixed_net(random.Random(seed))
    for directed, mode in ((False, Traversal.UNDIRECTED), (True, Traversal.DIRECTED)):
        d = floyd_warshall(net, directed)
        for u in net.vertex_ids:
            got = net.bfs_distances(u, mode)
            for v in net.vertex_ids:
                want = d[u, v]
                assert got.get(v, INF) == want
                if u != v and want != INF:
                    p = net.shortest_path(u, v, mode)
                    assert len(p) == want
                    assert len(set(p.vertices)) == len(p.vertices)
    for v in net.vertex_ids:
        nb, pa, ch = incidence_sets(net, v)
        assert (net.neighbors(v), net.parents(v), net.children(v)) == (nb, pa, ch)
        assert net.cg_degree(v) == net.degree(v) + net.in_degree(v) + net.out_degree(v)
        for u in net.neighbors(v):
            assert v in net.neighbors(u)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_hop_distance_is_a_metric(seed):
    net = random_mixed_net(random.Random(seed))
    ids = net.vertex_ids
    d = {u: net.bfs_distances(u) for u in ids}
    for a in ids:
        for b in ids:
            if b not in d[a]:
                continue
            assert d[a][b] == d[b][a]
            for c in ids:
                if c in d[b]:
                    assert d[a][c] <= d[a][b] + d[b][c]


def test_path_validation(path3):
    with pytest.raises(NetworkError, match="not adjacent"):
        path3.path([1, 3])
    with pytest.raises(NetworkError, match="repeats"):
        path3.path([1, 2, 1])
    p = path3.path([3, 2, 1])
    assert p.edges == (2, 1)
    assert p.handle == "3-2-1"
