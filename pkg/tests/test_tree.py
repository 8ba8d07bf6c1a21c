import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wbst import tree as t

FIG_LIST = [4, 2, 6, 5, 7, 3, 1]


@pytest.fixture(scope="module")
def fig_tree():
    return t.build_from_permutation(FIG_LIST)


def test_build_figure_tree(fig_tree):
    # root 4, children 2 and 6, leaves 1, 3, 5, 7
    assert fig_tree.keys[0] == 4
    root = fig_tree.root
    l, r = fig_tree.left[root], fig_tree.right[root]
    assert fig_tree.keys[l] == 2 and fig_tree.keys[r] == 6
    leaf_keys = sorted(
        fig_tree.keys[v]
        for v in range(fig_tree.n)
        if fig_tree.left[v] < 0 and fig_tree.right[v] < 0
    )
    assert leaf_keys == [1, 3, 5, 7]
    fig_tree.check_bst()


def test_build_singleton():
    one = t.build_from_permutation([1])
    assert one.n == 1 and one.height() == 0


def test_build_three():
    tr = t.build_from_permutation([2, 1, 3])
    assert tr.keys[0] == 2
    assert tr.keys[tr.left[0]] == 1 and tr.keys[tr.right[0]] == 3


def test_build_rejects_bad_input():
    with pytest.raises(ValueError):
        t.build_from_permutation([1, 1])
    with pytest.raises(ValueError):
        t.build_from_permutation([0, 1])
    with pytest.raises(ValueError):
        t.build_from_permutation([])


def test_build_iid_deterministic():
    a = t.build_iid(50, seed=123)
    b = t.build_iid(50, seed=123)
    assert a.keys == b.keys
    assert a.shape_signature() == b.shape_signature()


def test_build_iid_key_mean_sane():
    n = 10**4
    keys = t.iid_keys(n, seed=42)
    assert abs(keys.mean() - 0.5) < 4 / np.sqrt(n)


def test_depth_and_weight_examples(fig_tree):
    obs = t.depth_and_weight(fig_tree, 5)
    assert (obs.depth, obs.weighted_depth) == (2, 15)
    obs = t.depth_and_weight(fig_tree, 4)
    assert (obs.depth, obs.weighted_depth) == (0, 4)
    obs = t.depth_and_weight(fig_tree, 7)
    assert (obs.depth, obs.weighted_depth) == (2, 17)
    with pytest.raises(KeyError):
        t.depth_and_weight(fig_tree, 9)


def test_last_inserted(fig_tree):
    obs = t.last_inserted(fig_tree)
    assert (obs.depth, obs.weighted_depth, obs.node_key) == (2, 7, 1)
    two = t.build_from_permutation([1, 2])
    obs = t.last_inserted(two)
    assert (obs.depth, obs.weighted_depth) == (1, 3)
    one = t.build_from_permutation([1])
    obs = t.last_inserted(one)
    assert (obs.depth, obs.weighted_depth) == (0, 1)


def test_silhouette_depths(fig_tree):
    obs = t.silhouette_depths(fig_tree, t.DyadicPath.zero())
    assert (obs.depth, obs.weighted_depth) == (2, 7)
    obs = t.silhouette_depths(fig_tree, t.DyadicPath.one())
    assert (obs.depth, obs.weighted_depth) == (2, 17)
    one = t.build_iid(1, seed=3)
    obs = t.silhouette_depths(one, t.DyadicPath.from_value(0.37))
    assert obs.depth == 0 and obs.weighted_depth == one.keys[0]


def test_distance_and_weight(fig_tree):
    assert t.distance_and_weight(fig_tree, 1, 3) == (2, 6)
    assert t.distance_and_weight(fig_tree, 5, 7) == (2, 18)
    assert t.distance_and_weight(fig_tree, 3, 3) == (0, 3)
    assert t.distance_and_weight(fig_tree, 1, 7) == (4, 20)


def test_dfs_external(fig_tree):
    obs = t.dfs_external(fig_tree)
    assert len(obs) == 8
    assert all(o.depth == 3 for o in obs)
    assert obs[0].weighted_depth == 7
    one = t.build_iid(1, seed=9)
    eo = t.dfs_external(one)
    assert len(eo) == 2
    assert all(o.depth == 1 and o.weighted_depth == one.keys[0] for o in eo)


def test_dfs_external_key_intervals():
    # external visit order must interleave with the sorted keys
    tr = t.build_from_permutation([3, 1, 4, 2, 5])
    obs = t.dfs_external(tr)
    assert len(obs) == 6
    depths = tr.depths()
    wd = tr.weighted_depths()
    for k in range(1, 6):
        v = tr.node_of_key(k)
        h = tr.subtree_heights()[v]
        assert depths[v] < obs[k - 1].depth <= depths[v] + h
        assert wd[v] <= obs[k - 1].weighted_depth


def test_height_examples(fig_tree):
    assert fig_tree.height() == 2
    assert t.build_from_permutation([1]).height() == 0
    assert t.build_from_permutation(list(range(1, 9))).height() == 7


def test_dyadic_path():
    p = t.DyadicPath.from_value(0.5)
    assert p.bits[0] == 1 and all(b == 0 for b in p.bits[1:])
    assert t.DyadicPath.one().value == 1.0
    assert t.DyadicPath.zero().value == 0.0
    assert t.DyadicPath.from_value(0.375).value == pytest.approx(0.375)
    with pytest.raises(ValueError):
        t.DyadicPath((0, 2))


def test_couple_models_holds():
    for rep in range(5):
        _, _, rep100 = t.couple_models(100, seed=21, replicate=rep)
        assert rep100.holds
    t1, t2, rep1 = t.couple_models(1, seed=21)
    assert rep1.holds
    assert rep1.rhs == pytest.approx(abs(t1.keys[0] - 1.0))


@settings(max_examples=40, deadline=None)
@given(st.permutations(list(range(1, 10))))
def test_bst_invariant_random(perm):
    tr = t.build_from_permutation(perm)
    tr.check_bst()
    order = [tr.keys[v] for v in tr.in_order()]
    assert order == sorted(perm)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 60), st.integers(0, 10**6))
def test_shape_equivalence(n, seed):
    keys = t.iid_keys(n, seed)
    ranks = np.argsort(np.argsort(keys)) + 1
    a = t.build_from_keys(keys)
    b = t.build_from_permutation([int(r) for r in ranks])
    assert a.shape_signature() == b.shape_signature()


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 40), st.integers(0, 10**6))
def test_event_representation_matches_traversal(n, seed):
    # permutation-model weighted depth = sum of j over ancestor-or-self j
    g = np.random.Generator(np.random.Philox(seed))
    perm = [int(v) for v in g.permutation(n) + 1]
    tr = t.build_from_permutation(perm)
    arrival = {r: i for i, r in enumerate(perm)}
    for k in range(1, n + 1):
        anc_sum = 0
        cnt = 0
        for j in range(1, n + 1):
            lo, hi = min(j, k), max(j, k)
            if arrival[j] == min(arrival[m] for m in range(lo, hi + 1)):
                anc_sum += j
                cnt += 1
        obs = t.depth_and_weight(tr, k)
        assert obs.weighted_depth == anc_sum
        assert obs.depth == cnt - 1


def test_weighted_height_bounds():
    tr = t.build_iid(500, seed=77)
    wh = t.weighted_height(tr)
    assert wh <= tr.height() + 1
    one = t.build_iid(1, seed=5)
    assert t.weighted_height(one) == one.keys[0]


def test_dfs_sandwich_every_rank():
    # per-sample: depth_k <= external depth_k <= depth_k + node-count subtree
    # height, and the weighted version with the subtree max key
    g = np.random.Generator(np.random.Philox(909))
    for _ in range(20):
        n = int(g.integers(2, 120))
        perm = [int(v) for v in g.permutation(n) + 1]
        tr = t.build_from_permutation(perm)
        obs = t.dfs_external(tr)
        depths = tr.depths()
        wd = tr.weighted_depths()
        hts = tr.subtree_heights()
        mx = tr.subtree_max_key()
        for k in range(1, n + 1):
            v = tr.node_of_key(k)
            assert depths[v] < obs[k - 1].depth <= depths[v] + hts[v]
            assert wd[v] <= obs[k - 1].weighted_depth <= wd[v] + mx[v] * hts[v]
