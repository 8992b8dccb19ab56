import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lisna.graph import ancestors_edge_set, descendants_edge_set
from lisna.pattern import SnappedPattern, pattern_from_counts
from lisna.second_order import EntityError, lag_second_order, resolve, second_order
from lisna.sim import SimSpec, simulate

from conftest import make_net, mixed_net
import tables


def test_resolve_edge_and_sets(mixed):
    assert resolve(mixed, "edge 5").edges == {5}
    star = make_net([(2, 1, False), (2, 3, False), (2, 4, False)])
    ref = resolve(star, "nach(v2)")
    assert ref.edges == {1, 2, 3}
    assert ref.length == pytest.approx(sum(e.length for e in star.edges))


def test_resolve_reduced_paths_match_graph(mixed):
    path = mixed.path([1, 2, 3, 4])
    assert resolve(mixed, "anch(1-2-3-4)").edges == ancestors_edge_set(path)
    assert resolve(mixed, "dech(path 1-2-3-4)").edges == descendants_edge_set(path)
    assert resolve(mixed, "anch(1..4)").edges == ancestors_edge_set(path)


@pytest.mark.parametrize("entity", ["edge 99", "nach(1)", "edge 5 in 2", "anch(2-6-7)",
                                  "anch(1-2)", "bogus", "pa(99)", "path 1-3"])
def test_resolve_errors(mixed, entity):
    with pytest.raises(EntityError):
        resolve(mixed, entity)


def test_single_replicate_is_degenerate():
    net = make_net([(1, 2, False), (3, 4, False)], lengths={1: 2.0, 2: 4.0})
    p = pattern_from_counts(net, {1: 3, 2: 5})
    res = second_order(p, resolve(net, "edge 1"), resolve(net, "edge 2"))
    assert res.intensity == 3 * 5 / (2.0 * 4.0)
    assert res.covariance == 0.0
    assert res.degenerate


def test_two_replicate_hand_value():
    net = make_net([(1, 2, False), (3, 4, False)], lengths={1: 1.0, 2: 1.0})
    p = SnappedPattern(net, (0, 1), np.array([[1, 2], [3, 6]]))
    res = second_order(p, resolve(net, "edge 1"), resolve(net, "edge 2"))
    assert res.covariance == 2.0
    assert res.intensity == 10.0
    assert not res.degenerate
    assert res.per_replicate == [(1.0, 2.0), (3.0, 6.0)]


def test_overlap_rejected(mixed):
    p = pattern_from_counts(mixed, {})
    with pytest.raises(EntityError, match="share"):
        second_order(p, resolve(mixed, "nach(6)"), resolve(mixed, "edge 5"))


def _random_pattern(net, seed, R):
    rng = np.random.default_rng(seed)
    return SnappedPattern(net, tuple(range(R)), rng.integers(0, 9, size=(R, net.n_edges)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 12), st.sampled_from(tables.ALL))
def test_symmetry_and_covariance_oracle(seed, R, pair):
    mixed = mixed_net()
    p = _random_pattern(mixed, seed, R)
    a, b = resolve(mixed, pair[0]), resolve(mixed, pair[1])
    ab, ba = second_order(p, a, b), second_order(p, b, a)
    assert ab.intensity == ba.intensity and ab.covariance == ba.covariance
    ya = p.counts[:, [mixed.edge_position(e) for e in a.edges]].sum(axis=1) / a.length
    yb = p.counts[:, [mixed.edge_position(e) for e in b.edges]].sum(axis=1) / b.length
    want = np.cov(np.vstack([ya, yb]), ddof=0)[0, 1] if R > 1 else 0.0
    assert ab.covariance == pytest.approx(want, abs=1e-12)


def test_gamma_ignores_constant_shift():
    net = make_net([(1, 2, False), (3, 4, False)], lengths={1: 1.0, 2: 1.0})
    counts = np.array([[1, 4], [5, 2], [2, 2], [7, 9]])
    base = SnappedPattern(net, (0, 1, 2, 3), counts)
    shifted = SnappedPattern(net, (0, 1, 2, 3), counts + np.array([3, 0]))
    a, b = resolve(net, "edge 1"), resolve(net, "edge 2")
    r0, r1 = second_order(base, a, b), second_order(shifted, a, b)
    assert r0.covariance == pytest.approx(r1.covariance, abs=1e-12)
    assert r0.intensity != r1.intensity


def test_every_table_row_evaluates(mixed):
    p = _random_pattern(mixed, 0, 5)
    assert len(tables.ALL) >= 24
    for a, b in tables.ALL:
        res = second_order(p, resolve(mixed, a), resolve(mixed, b))
        assert np.isfinite(res.intensity) and np.isfinite(res.covariance)


def test_lag_estimator_hand_value():
    net = make_net([(1, 2, False), (2, 3, False), (3, 4, False)],
                   lengths={1: 1.0, 2: 1.0, 3: 1.0})
    p = pattern_from_counts(net, {1: 2, 3: 3})
    res = lag_second_order(p, 1)
    assert res.n_pairs == 2
    assert res.intensity == 6.0
    assert res.covariance == pytest.approx(6.0 - (5 / 3) ** 2)
    with pytest.raises(EntityError):
        lag_second_order(p, 3)


def test_lag_estimator_positive_under_clustering():
    # two disjoint 3-edge paths; events only on the outer edges of the first
    net = make_net([(1, 2, False), (2, 3, False), (3, 4, False),
                    (5, 6, False), (6, 7, False), (7, 8, False)],
                   lengths={i: 1.0 for i in range(1, 7)})
    p = pattern_from_counts(net, {1: 10, 3: 10})
    assert lag_second_order(p, 1).covariance > 0


def test_lag_estimator_near_zero_under_poisson():
    net = make_net([(i, i + 1, False) for i in range(30)])
    p = simulate(net, SimSpec(rate=0.4, replicates=300, seed=5), positions=False)
    for k in (1, 2, 4):
        res = lag_second_order(p, k)
        g = np.array([gm for _, gm in res.per_replicate])
        se = g.std(ddof=1) / np.sqrt(g.size)
        # plug-in squared mean carries an O(1/E) bias; allow it on top of 3 SE
        bias = g.var() / 30 + 0.4 / np.mean([e.length for e in net.edges]) / 30
        assert abs(res.covariance) < 3 * se + bias
