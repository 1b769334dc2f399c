from itertools import combinations
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from f2amalgam import permmod
from f2amalgam.combinat import binom, rank_colex, subsets
from f2amalgam.f2linalg import F2Subspace, matmul, subspace_sum
from f2amalgam.permmod import (
    InexactWindowError,
    aux_distributivity_check,
    beta_dual_apply,
    beta_matrix,
    char_identity,
    char_membership,
    char_sides,
    direct_sum_check,
    dual_kernel,
    exactness_check,
    image_module,
    in_image,
    indicator,
    kernel_module,
    require_exact,
    smallest_exact_window,
    uniqueimage_identity,
    v_A_basis,
    v_A_identity,
    v_BA_basis,
    w_A_basis,
    w_A_membership,
)

GOLDEN = Path(__file__).resolve().parent / "golden" / "ranks.txt"


def golden_records():
    rows = [line.split() for line in GOLDEN.read_text().splitlines() if not line.startswith("#")]
    return [tuple(int(x) for x in r) for r in rows]


@st.composite
def windows(draw, n_min=2, n_max=4, extra=3):
    n = draw(st.integers(n_min, n_max))
    N = draw(st.integers(n + 2, n + 2 + extra))
    return N, n


@st.composite
def window_and_set(draw, **kw):
    N, n = draw(windows(**kw))
    A = draw(st.sets(st.integers(0, N - 1), max_size=min(N, n + 3)))
    return N, n, frozenset(A)


@pytest.mark.parametrize("N, n, lo, hi, exact", golden_records())
def test_ranks_match_golden(N, n, lo, hi, exact):
    cert = exactness_check(N, n)
    assert (cert.rank_lo, cert.rank_hi, int(cert.exact)) == (lo, hi, exact)
    assert cert.dim_mid == binom(N, n)


def test_beta_examples():
    m = beta_matrix(3, 2, 1).matrix
    assert list(np.flatnonzero(m[:, rank_colex((0, 1))])) == [0, 1]
    assert np.array_equal(beta_matrix(5, 3, 3).matrix, np.eye(10))
    assert np.array_equal(beta_matrix(4, 2, 0).matrix, np.ones((1, 6)))
    with pytest.raises(ValueError):
        beta_matrix(3, 2, 3)
    with pytest.raises(ValueError):
        beta_matrix(3, 4, 1)


def test_dual_apply_examples():
    g = beta_dual_apply(indicator(3, [0]), 3, 2)
    assert [g[rank_colex(w)] for w in ((0, 1), (0, 2), (1, 2))] == [1, 1, 0]
    assert not beta_dual_apply(np.zeros(5), 5, 2).any()
    g = beta_dual_apply(indicator(5, [0]) ^ indicator(5, [1]), 5, 2)
    assert g[rank_colex((0, 1))] == 0
    assert all(g[rank_colex((a, x))] == 1 for a in (0, 1) for x in (2, 3, 4))
    with pytest.raises(ValueError):
        beta_dual_apply(np.zeros(4), 5, 2)


@given(windows(n_min=1), st.data())
def test_dual_apply_is_subset_sum(win, data):
    N, n = win
    j = data.draw(st.integers(0, n))
    f = np.array(data.draw(st.lists(st.integers(0, 1), min_size=binom(N, j), max_size=binom(N, j))), np.uint8)
    g = beta_dual_apply(f, N, n, j)
    for w in subsets(n, N):
        assert g[rank_colex(w)] == sum(int(f[rank_colex(x)]) for x in combinations(w, j)) % 2


@pytest.mark.parametrize("n", range(1, 6))
def test_composite_is_zero_and_low_rank_closed_form(n):
    for N in range(n + 1, n + 8):
        lo, hi = beta_matrix(N, n, n - 1).matrix, beta_matrix(N, n + 1, n).matrix
        assert not matmul(lo, hi).any()
        assert exactness_check(N, n).rank_lo == binom(N - 1, n - 1)


def test_exact_window_search_and_gating(monkeypatch):
    for n in (2, 3, 4):
        assert smallest_exact_window(n, n + 1) <= n + 6
    fake = permmod.ExactnessCertificate(9, 2, 1, 1, 36, False)
    monkeypatch.setattr(permmod, "exactness_check", lambda N, n: fake)
    with pytest.raises(InexactWindowError):
        require_exact(9, 2)
    with pytest.raises(InexactWindowError):
        smallest_exact_window(2, 9, 10)


def test_image_equals_kernel_on_certified_windows():
    for N, n, *_ in golden_records():
        if N >= n + 1 and exactness_check(N, n).exact:
            assert image_module(N, n) == kernel_module(N, n)


def test_v_BA_examples():
    assert v_BA_basis(5, 2, (), ()) == F2Subspace.full(5)
    got = v_BA_basis(5, 2, {0, 1}, {0})
    assert got == F2Subspace.span([indicator(5, [0])])
    with pytest.raises(ValueError):
        v_BA_basis(5, 2, {0}, {1})


@given(window_and_set(), st.data())
def test_v_BA_dimension(args, data):
    N, n, A = args
    B = data.draw(st.sets(st.sampled_from(sorted(A)), max_size=n - 1)) if A else set()
    assert v_BA_basis(N, n, A, B).dim == binom(N - len(A), n - 1 - len(B))


@given(window_and_set())
def test_v_A_two_constructions_and_codimension(args):
    N, n, A = args
    assert v_A_identity(N, n, A)
    V = v_A_basis(N, n, A)
    assert binom(N, n - 1) - V.dim == binom(len(A), n - 1)
    if len(A) < n - 1:
        assert V == F2Subspace.full(binom(N, n - 1))


def test_v_A_singletons():
    V = v_A_basis(5, 2, {0, 1})
    assert V == F2Subspace.coordinate([2, 3, 4], 5)


def test_direct_sum_examples():
    assert direct_sum_check(5, 2, ()).holds
    r = direct_sum_check(5, 2, {0, 1})
    assert r.holds and sorted(r.dims) == [1, 1, 3] and r.sum_dim == 5


@given(window_and_set())
def test_direct_sum_holds(args):
    assert direct_sum_check(*args).holds


def test_w_A_examples():
    assert w_A_membership(6, 2, np.zeros(15), {0, 1})
    g = beta_dual_apply(indicator(6, [0]), 6, 2)
    assert in_image(6, 2, g) and not w_A_membership(6, 2, g, {0, 1})
    assert uniqueimage_identity(6, 2, {0, 1, 2})
    W = w_A_basis(6, 2, {0, 1, 2})
    assert W.dim == 3  # the stars at 3, 4, 5 stay independent


@given(window_and_set())
def test_w_A_descriptions_agree(args):
    assert uniqueimage_identity(*args)


@given(windows(), st.data())
def test_image_membership_paths_agree(win, data):
    # solving the linear system against testing the kernel condition
    N, n = win
    g = np.array(data.draw(st.lists(st.integers(0, 1), min_size=binom(N, n), max_size=binom(N, n))), np.uint8)
    assert in_image(N, n, g) == kernel_module(N, n).contains(g)
    f = np.array(data.draw(st.lists(st.integers(0, 1), min_size=binom(N, n - 1), max_size=binom(N, n - 1))), np.uint8)
    assert in_image(N, n, beta_dual_apply(f, N, n))


@given(window_and_set())
def test_char_identity(args):
    N, n, A = args
    assert char_identity(N, n, A)


def test_char_forward_inclusions():
    N, n, A = 7, 3, {0, 1, 2, 3}
    for f in v_A_basis(N, n, A).basis:
        assert char_membership(N, n, f, A)
    for f in dual_kernel(N, n).basis:
        assert char_membership(N, n, f, A)


def test_char_at_n_one():
    # nonempty A: both sides are zero
    for N in range(3, 7):
        for A in ({0}, {0, 2}, set(range(N))):
            assert char_identity(N, 1, A)
    # empty A: the left side is zero while the right side is everything
    lhs, rhs = char_sides(5, 1, ())
    assert lhs.dim == 0 and rhs.dim == 1


def test_aux_examples():
    assert aux_distributivity_check(7, 3, [{0, 1, 2}]).holds
    r = aux_distributivity_check(7, 3, [{0, 1, 2}, {1, 2, 3}])
    assert r.holds and not r.outside_hypothesis
    assert aux_distributivity_check(7, 3, [{0, 1}, {2, 3, 4}]).holds
    assert aux_distributivity_check(7, 3, [{0}, {1}, {2}]).outside_hypothesis


@given(windows(n_min=2, n_max=4), st.data())
def test_aux_below_n(win, data):
    N, n = win
    k = data.draw(st.integers(1, n - 1))
    fam = [data.draw(st.sets(st.integers(0, N - 1))) for _ in range(k)]
    r = aux_distributivity_check(N, n, fam)
    assert r.holds and r.lhs_dim == r.rhs_dim


def test_identities_rebuild_from_scratch():
    V = subspace_sum(v_A_basis(6, 3, {0, 1, 2}), dual_kernel(6, 3))
    assert V == char_sides(6, 3, {0, 1, 2})[1]


def test_aux_can_fail_once_k_reaches_n():
    # the constant kernel vector fills each V_{A_i} + K but not the intersection
    r = aux_distributivity_check(6, 2, [{0}, {1}])
    assert r.outside_hypothesis and not r.holds and (r.lhs_dim, r.rhs_dim) == (6, 5)
