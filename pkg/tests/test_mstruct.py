import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from f2amalgam.combinat import binom, rank_colex
from f2amalgam.f2linalg import F2Subspace
from f2amalgam.mstruct import (
    Fiber,
    Ground,
    NSet,
    WindowAutomorphism,
    WindowModel,
    closed_set,
    extend_to_permutation,
    supp,
)
from f2amalgam.permmod import beta_dual_apply, indicator

SMALL = [(N, n) for N in (4, 5, 6) for n in (2, 3, 4) if N >= n + 2]


def star(model, c):
    return beta_dual_apply(indicator(model.N, [c]), model.N, model.n)


def test_point_validation():
    with pytest.raises(ValueError):
        Fiber((0, 1), 2)


def test_identity_fixes_everything():
    m = WindowModel((6, 2))
    assert all(m.identity()(p) == p for p in m.all_points())


def test_fiber_flip():
    m = WindowModel((5, 2))
    # pick an image-module vector that is 1 on {0,1}
    g = star(m, 0)
    a = m.automorphism(g)
    assert a(Fiber((0, 1), 0)) == Fiber((0, 1), 1)
    assert a(Fiber((1, 2), 0)) == Fiber((1, 2), 0)


def test_automorphism_validation():
    m = WindowModel((5, 2))
    bad = np.zeros(10, np.uint8)
    bad[0] = 1
    with pytest.raises(ValueError):
        m.automorphism(bad)
    with pytest.raises(ValueError):
        m.automorphism(sigma=(0, 0, 1, 2, 3))
    with pytest.raises(ValueError):
        m.automorphism(sigma=(0, 1, 2))


@given(st.sampled_from([(5, 2), (6, 2), (6, 3), (7, 3)]), st.integers(0, 2**32 - 1))
def test_group_law_on_every_point(win, seed):
    m = WindowModel(win)
    rng = np.random.default_rng(seed)
    a, b = m.random_automorphism(rng), m.random_automorphism(rng)
    assert m.fiber_module.contains(a.g)
    ab, inv = a.compose(b), a.inverse()
    for p in m.all_points():
        assert ab(p) == a(b(p))
        assert inv(a(p)) == p
    assert a.compose(inv) == m.identity()


def test_action_is_bijective_on_sorts():
    m = WindowModel((6, 3))
    a = m.random_automorphism(np.random.default_rng(7))
    pts = m.all_points()
    images = [a(p) for p in pts]
    assert sorted(map(str, images)) == sorted(map(str, pts))
    assert all(type(p) is type(q) for p, q in zip(pts, images))


def test_supp_examples():
    assert supp([Ground(3)]) == {3}
    assert supp([Fiber((1, 2), 0)]) == {1, 2}
    assert supp([]) == frozenset()
    assert supp([NSet((0, 4)), Ground(2)]) == {0, 2, 4}


def test_cl_examples():
    m = WindowModel((5, 2))
    c = m.cl({1, 2})
    assert c.points == {Ground(1), Ground(2), NSet((1, 2)), Fiber((1, 2), 0), Fiber((1, 2), 1)}
    assert m.cl({3}).points == {Ground(3)}
    assert len(m.cl(())) == 0
    with pytest.raises(ValueError):
        m.cl({5})


@given(st.sets(st.integers(0, 6)), st.sets(st.integers(0, 6)))
def test_cl_is_a_closure_operator(A, B):
    m = WindowModel((7, 3))
    cA, cAB = m.cl(A), m.cl(A | B)
    assert m.closure(cA.points) == cA
    assert cA.points <= cAB.points
    assert all(Ground(c) in cA for c in A)
    assert cAB.support == A | B
    assert len(cA) == len(A) + 3 * binom(len(A), 3)


def test_extend_to_permutation():
    sigma = extend_to_permutation({0: 3, 2: 0}, 5)
    assert sorted(sigma) == list(range(5)) and sigma[0] == 3 and sigma[2] == 0
    with pytest.raises(ValueError):
        extend_to_permutation({0: 1, 2: 1}, 4)


def test_stabilizer_examples():
    m = WindowModel((6, 2))
    s = m.pointwise_stabilizer(())
    assert s.module == m.fiber_module and s.moved == set(range(6))
    g = star(m, 0)
    assert g[rank_colex((0, 1))] == 1
    a = m.automorphism(g)
    assert not m.in_stabilizer(a, {0, 1})
    assert not m.fixes_pointwise(a, m.cl({0, 1}).points)


@pytest.mark.parametrize("N, n", SMALL)
def test_stabilizer_brute_force(N, n):
    m = WindowModel((N, n))
    # Sym(N) makes initial segments representative of every support size
    for size in range(N + 1):
        r = m.stabilizer_brute_force(range(size))
        assert r.matches and r.fixing == r.predicted, (N, n, size)


def test_stabilizer_brute_force_spec_case():
    r = WindowModel((5, 2)).stabilizer_brute_force({0, 1, 2})
    assert r.matches and r.fixing == 2 * 4


def test_induced_fiber_group_examples():
    m = WindowModel((6, 3))
    assert m.induced_fiber_group(F2Subspace.zero(20), {0, 1, 2}).order == 1
    assert m.induced_fiber_group(m.fiber_module, {0, 1, 2}).order == 2
    assert m.induced_fiber_group(m.fiber_module, range(6)) == m.fiber_module
    with pytest.raises(ValueError):
        m.induced_fiber_group(F2Subspace.zero(5), {0})


@pytest.mark.parametrize("N, n, A", [(6, 2, range(6)), (6, 2, {0, 1, 2}), (7, 3, {0, 1, 2, 3}), (8, 3, {1, 4, 6, 7, 2})])
def test_window_restriction(N, n, A):
    assert WindowModel((N, n)).window_restriction_check(A)


def test_window_restriction_needs_n_points():
    with pytest.raises(ValueError):
        WindowModel((6, 3)).window_restriction_check({0, 1})


def test_iter_automorphisms_counts_group():
    m = WindowModel((4, 2))
    auts = list(m.iter_automorphisms())
    assert len(auts) == 24 * m.fiber_module.order
    assert len(set(auts)) == len(auts)


def test_closed_set_helper_sorted():
    pts = closed_set({0, 1, 2}, 2).sorted_points()
    assert pts[:3] == [Ground(0), Ground(1), Ground(2)]


def test_window_automorphism_shape_check():
    with pytest.raises(ValueError):
        WindowAutomorphism(2, np.zeros(3, np.uint8), (0, 1, 2, 3))
