import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cswl.params import MapParams, association_block
from cswl.som import (
    MapNode,
    SomMap,
    activation,
    relevance_from_moments,
    update_node,
    weighted_distance,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def params(**kw):
    base = dict(a_t=0.9, lp=0.1, beta=0.1, maxcomp=1000, e_b=0.1, e_n=0.0, s=0.1, conn_thr=0.5)
    base.update(kw)
    return MapParams(**base)


def node(c, w=None, d=None):
    c = np.asarray(c, dtype=float)
    w = np.ones_like(c) if w is None else w
    d = np.zeros_like(c) if d is None else d
    return MapNode(c, d, w)


def brute_activations(m, x):
    out = []
    for n in m.nodes:
        out.append(1.0 / (1.0 + np.sqrt(np.sum((n.relevance * (x - n.center)) ** 2))
                          / (np.sum(n.relevance ** 2) + m.params.epsilon)))
    return np.array(out)


# -- distance and activation ---------------------------------------------

def test_distance_zero_at_center():
    n = node([0.3, -2.0], w=[0.2, 0.9])
    assert weighted_distance([0.3, -2.0], n) == 0.0


def test_distance_zero_when_fully_masked():
    assert weighted_distance([5.0, 7.0], node([0, 0], w=[0.0, 0.0])) == 0.0


def test_distance_hand_value():
    assert weighted_distance([1, 0], node([0, 0], w=[0.5, 1.0])) == pytest.approx(0.5, abs=1e-15)


def test_activation_hand_values():
    n = node([0, 0])
    assert activation([0, 0], n, 1e-9) == 1.0
    assert activation([1, 0], n, 1e-9) == pytest.approx(1 / 1.5, abs=1e-9)
    # D equal to |w|^2 + eps sits at the midpoint
    one = node([0.0])
    assert activation([1.0 + 1e-9], one, 1e-9) == pytest.approx(0.5, abs=1e-12)


def test_dimension_mismatch_raises():
    with pytest.raises(ValueError):
        weighted_distance([1, 2, 3], node([0, 0]))
    m = SomMap(params(), 2, init=[0, 0])
    with pytest.raises(ValueError):
        m.organize_step([1.0])


@given(arrays(float, 4, elements=st.floats(0, 1)), arrays(float, 4, elements=finite),
       arrays(float, 4, elements=finite), st.floats(1.0, 5.0))
def test_activation_monotone_in_distance(w, c, x, scale):
    n = node(c, w=w)
    far = c + scale * (x - c)
    assert weighted_distance(far, n) >= weighted_distance(x, n) - 1e-12
    assert activation(far, n, 1e-9) <= activation(x, n, 1e-9) + 1e-12
    assert 0.0 < activation(x, n, 1e-9) <= 1.0


# -- relevance and node update ---------------------------------------------

def test_uniform_moments_give_full_relevance():
    assert np.array_equal(relevance_from_moments(np.full(5, 0.3), 0.1), np.ones(5))


def test_update_rate_zero_leaves_node():
    n = node([0.1, 0.2], w=[0.4, 0.7], d=[0.01, 0.03])
    out = update_node(n, [3.0, 4.0], 0.0, params())
    assert np.array_equal(out.center, n.center)
    assert np.array_equal(out.dist_moment, n.dist_moment)
    assert np.array_equal(out.relevance, n.relevance)


def test_update_hand_values():
    out = update_node(node([0, 0]), [1, 1], 0.5, params(beta=0.1))
    np.testing.assert_allclose(out.center, [0.5, 0.5], atol=1e-15)
    np.testing.assert_allclose(out.dist_moment, [0.05, 0.05], atol=1e-15)
    np.testing.assert_array_equal(out.relevance, [1.0, 1.0])


def test_noisy_dimension_loses_relevance():
    out = update_node(node([0, 0, 0]), [0.0, 0.0, 1.0], 0.5, params(s=0.1))
    assert out.relevance[2] < out.relevance[0] == out.relevance[1]


@settings(max_examples=60)
@given(arrays(float, 6, elements=finite), st.lists(arrays(float, 6, elements=finite), min_size=1, max_size=8),
       st.floats(0, 1), st.floats(1e-3, 3))
def test_update_keeps_bounds(c, xs, rate, s):
    p = params(s=s)
    n = node(c)
    for x in xs:
        n = update_node(n, x, rate, p)
        assert np.all((n.relevance >= 0) & (n.relevance <= 1))
        assert np.all(n.dist_moment >= 0)


@given(arrays(float, (3, 5), elements=st.floats(0, 100)), st.floats(1e-4, 10))
def test_relevance_rows_bounded(delta, s):
    w = relevance_from_moments(delta, s)
    assert w.shape == delta.shape
    assert np.all((w >= 0) & (w <= 1))


# -- setup_neighborhood ------------------------------------------------------

def _map_with_relevances(rows, conn_thr):
    m = SomMap(params(conn_thr=conn_thr), len(rows[0]), init=np.zeros(len(rows[0])))
    for _ in rows[1:]:
        m._append(np.zeros(len(rows[0])), 0.0)
    m._w = np.array(rows, dtype=float)
    for nid in m.node_ids:
        m.setup_neighborhood(nid)
    return m


def test_neighborhood_identical_subspaces_connect():
    m = _map_with_relevances([[1, 1], [1, 1]], 0.99)
    assert m.node(0).neighbors == {1}


def test_neighborhood_disjoint_subspaces_stay_apart():
    m = _map_with_relevances([[1, 0], [0, 1]], 0.1)
    assert m.node(0).neighbors == set()


def test_neighborhood_cosine_hand_value():
    m = _map_with_relevances([[1, 1], [1, 0]], 0.5)
    assert m.node(0).neighbors == {1} and m.node(1).neighbors == {0}
    assert _map_with_relevances([[1, 1], [1, 0]], 0.71).node(0).neighbors == set()


# -- find_winner and cluster_assign -------------------------------------------

def three_node_map(a_t=0.9):
    m = SomMap(params(a_t=a_t), 1, init=[0.0])
    m._append(np.array([1.0]), 0.0)
    m._append(np.array([2.0]), 0.0)
    return m


def test_find_winner_single_node():
    m = SomMap(params(), 3, init=[0, 0, 0])
    assert m.find_winner([1, 1, 1])[0] == 0


def test_find_winner_exact_center():
    m = three_node_map()
    assert m.find_winner([2.0]) == (2, 1.0)


def test_find_winner_matches_brute_force():
    m = three_node_map()
    nid, act = m.find_winner([0.9])
    ref = brute_activations(m, np.array([0.9]))
    assert nid == 1
    assert act == pytest.approx(ref.max(), abs=1e-15)


def test_find_winner_breaks_ties_with_seeded_rng():
    def winners(seed):
        m = SomMap(params(), 1, rng_seed=seed, init=[0.0])
        m._append(np.array([2.0]), 0.0)
        return [m.find_winner([1.0])[0] for _ in range(40)]

    assert set(winners(3)) == {0, 1}
    assert winners(3) == winners(3)


def test_cluster_assign_examples():
    m = three_node_map(a_t=0.6)
    assert m.cluster_assign([1.0])[0][0] == 1
    assert m.cluster_assign([50.0]) == []
    # x=1.25: node 1 at 0.8, node 2 at 0.571, node 0 at 0.444 (a_t 0.5)
    m = three_node_map(a_t=0.5)
    out = m.cluster_assign([1.25])
    assert [nid for nid, _ in out] == [1, 2]
    assert out[0][1] > out[1][1]


@given(arrays(float, 3, elements=finite), arrays(float, 3, elements=finite), st.floats(0.05, 0.95))
def test_cluster_assign_single_node_oracle(c, x, a_t):
    m = SomMap(params(a_t=a_t), 3, init=c)
    act = activation(x, m.node(0), m.params.epsilon)
    out = m.cluster_assign(x)
    assert (len(out) == 1) == (act >= a_t)


@settings(max_examples=40)
@given(st.lists(arrays(float, 2, elements=st.floats(0, 1)), min_size=2, max_size=25),
       arrays(float, 2, elements=st.floats(0, 1)), st.integers(0, 2**32 - 1))
def test_cluster_assign_equals_sorted_filter(stream, x, seed):
    m = SomMap(params(a_t=0.8, e_n=0.01), 2, rng_seed=seed)
    m.train(stream)
    acts = brute_activations(m, x)
    expect = sorted((a for a in acts if a >= m.params.a_t), reverse=True)
    got = [a for _, a in m.cluster_assign(x)]
    np.testing.assert_allclose(got, expect, atol=1e-12)


# -- organize_step -------------------------------------------------------------

def test_far_input_inserts_and_equal_input_updates():
    m = SomMap(params(a_t=0.5), 1, init=[0.0])
    ev = m.organize_step([5.0])
    assert ev.inserted and len(m) == 2
    assert np.array_equal(m.node(ev.node_id).center, [5.0])
    ev = m.organize_step([5.0])
    assert ev.kind == "updated" and ev.activation == 1.0


def test_inserted_node_gets_lp_times_nwins():
    m = SomMap(params(a_t=0.5, lp=0.25), 1, init=[0.0])
    for _ in range(3):
        m.organize_step([0.0])
    ev = m.organize_step([9.0])
    assert m.node(ev.node_id).wins == pytest.approx(0.25 * 4)


def test_prune_removes_node_that_never_wins():
    # step 1 inserts a node at 5; steps 2-4 update it; the prune on step 4
    # drops the initial node (0 wins < lp*maxcomp = 2) and keeps node 1 (3.5)
    m = SomMap(params(a_t=0.5, lp=0.5, maxcomp=4), 1, init=[0.0])
    events = [m.organize_step([5.0]) for _ in range(4)]
    assert [e.pruned for e in events] == [0, 0, 0, 1]
    assert m.node_ids == [1]
    assert m.node(1).wins == 0.0
    assert m.nwins == 1


def test_prune_never_empties_map():
    m = SomMap(params(a_t=0.01, lp=1.0, maxcomp=2), 1, init=[0.0])
    for _ in range(6):
        m.organize_step([0.5])
        assert len(m) >= 1


@settings(max_examples=40, deadline=None)
@given(st.lists(arrays(float, 3, elements=st.floats(0, 1)), min_size=1, max_size=40),
       st.floats(0.5, 0.99), st.integers(2, 9), st.integers(0, 2**32 - 1))
def test_insertion_and_prune_rules(stream, a_t, maxcomp, seed):
    p = params(a_t=a_t, lp=0.2, maxcomp=maxcomp, e_n=0.05, n_max=12)
    m = SomMap(p, 3, rng_seed=seed)
    for x in stream:
        before = {nid: m.node(nid).wins for nid in m.node_ids}
        nwins = m.nwins
        best = brute_activations(m, x).max()
        ev = m.organize_step(x)
        assert len(m) >= 1
        assert (ev.pruned > 0) <= (nwins == maxcomp)
        if best < a_t and len(before) < p.n_max:
            assert ev.inserted
            if ev.pruned == 0:
                assert len(m) == len(before) + 1
            assert np.array_equal(m.node(ev.node_id).center, x) or ev.node_id not in m.node_ids
        if ev.pruned:
            gone = set(before) - set(m.node_ids)
            winner_bonus = {ev.node_id: 1.0} if not ev.inserted else {}
            for nid in gone:
                assert before[nid] + winner_bonus.get(nid, 0.0) < p.lp * maxcomp
        assert 1 <= m.nwins <= maxcomp


def test_determinism():
    rng = np.random.default_rng(5)
    stream = rng.uniform(size=(60, 4))
    p = association_block().to_params()
    a, b = SomMap(p, 4, rng_seed=11), SomMap(p, 4, rng_seed=11)
    a.train(stream)
    b.train(stream)
    assert a.to_text() == b.to_text()
    c = SomMap(p, 4, rng_seed=12)
    c.train(stream)
    assert c.to_text() != a.to_text()


def test_snapshot_round_trip():
    rng = np.random.default_rng(2)
    m = SomMap(params(a_t=0.95, e_n=0.02), 3, rng_seed=4)
    m.train(rng.normal(size=(30, 3)))
    back = SomMap.from_text(m.to_text())
    assert back.to_text() == m.to_text()
    for a, b in zip(m.nodes, back.nodes):
        assert np.array_equal(a.center, b.center)
        assert np.array_equal(a.relevance, b.relevance)
    # the restored rng continues the same sequence
    x = rng.normal(size=3)
    assert m.organize_step(x) == back.organize_step(x)


def test_snapshot_rejects_other_text():
    with pytest.raises(ValueError):
        SomMap.from_text("something else\n")


def test_params_validation():
    with pytest.raises(ValueError):
        params(a_t=1.0)
    with pytest.raises(ValueError):
        params(maxcomp=0)
    with pytest.raises(ValueError):
        params(s=0.0)
