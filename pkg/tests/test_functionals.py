import pytest

from wbst import functionals as fn
from wbst import tree as t
from wbst.rng import stream

FIG_LIST = [4, 2, 6, 5, 7, 3, 1]


def test_single_node():
    tr = t.build_from_keys([0.7])
    f = fn.functionals_recursive(tr)
    assert f.path_length == 0 and f.wiener == 0
    assert f.weighted_path_length == pytest.approx(0.7)
    assert f.weighted_wiener == pytest.approx(0.7)
    g = fn.functionals_naive(tr)
    assert f.as_tuple() == g.as_tuple()


def test_figure_tree_values():
    f = fn.functionals_recursive(t.build_from_permutation(FIG_LIST))
    assert f.path_length == 10
    assert f.weighted_path_length == 68


def test_chain_wiener():
    f = fn.functionals_recursive(t.build_from_permutation([1, 2, 3]))
    # distances: (1,2)=1, (2,3)=1, (1,3)=2
    assert f.path_length == 3
    assert f.wiener == 4


def test_two_node_weighted_wiener():
    a, b = 0.2, 0.9
    f = fn.functionals_naive(t.build_from_keys([a, b]))
    assert f.wiener == 1
    assert f.weighted_wiener == pytest.approx((a + b) + a + b)


def test_recursive_equals_naive_permutation_model():
    g = stream(101, 0)
    for _ in range(60):
        n = int(g.integers(1, 120))
        perm = [int(v) for v in g.permutation(n) + 1]
        tr = t.build_from_permutation(perm)
        a = fn.functionals_recursive(tr)
        b = fn.functionals_naive(tr)
        assert a.as_tuple() == b.as_tuple()  # exact integers


def test_recursive_equals_naive_iid_model():
    g = stream(102, 0)
    for i in range(60):
        n = int(g.integers(1, 120))
        tr = t.build_from_keys(g.random(n))
        a = fn.functionals_recursive(tr)
        b = fn.functionals_naive(tr)
        assert a.path_length == b.path_length
        assert a.wiener == b.wiener
        assert a.weighted_path_length == pytest.approx(b.weighted_path_length, rel=1e-9)
        assert a.weighted_wiener == pytest.approx(b.weighted_wiener, rel=1e-9)


def test_naive_guard():
    with pytest.raises(ValueError):
        fn.functionals_naive(_fake_big_tree())


def _fake_big_tree():
    tr = t.LabelledTree(rank_model=True)
    tr.keys = list(range(fn.NAIVE_SIZE_LIMIT + 1))
    return tr


def test_affine_identity_figure():
    tr = t.build_from_permutation(FIG_LIST)
    rep = fn.affine_relabel_check(tr, alpha=2.0, beta=1.0)
    assert rep.holds(1e-9)
    relabeled = t.build_from_keys([2.0 * k + 1.0 for k in tr.keys])
    f = fn.functionals_recursive(relabeled)
    assert f.weighted_path_length == pytest.approx(153.0)


def test_affine_identity_random():
    tr = t.build_iid(100, seed=7)
    assert fn.affine_relabel_check(tr, 0.5, 0.25).holds(1e-9)
    assert fn.affine_relabel_check(tr, 1.0, 0.0).max_relative() == 0.0


def test_reflection_identities():
    assert fn.reflection_check(1, seed=3).holds(1e-9)
    assert fn.reflection_check(2, seed=3).holds(1e-9)
    for rep in range(5):
        assert fn.reflection_check(257, seed=11, replicate=rep).holds(1e-9)
    assert fn.reflection_check(10**4, seed=11).holds(1e-9)


def test_wiener_at_least_path_length():
    g = stream(103, 0)
    for _ in range(20):
        n = int(g.integers(2, 80))
        tr = t.build_from_permutation([int(v) for v in g.permutation(n) + 1])
        f = fn.functionals_recursive(tr)
        assert f.wiener >= f.path_length
