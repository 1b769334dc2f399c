"""Inclusion maps between subset levels and the submodules built from them.

Functions on j-subsets are row vectors of length binom(N, j).  The dual
map from level j to level n sends f to g(w) = sum of f over the j-subsets
of w; as a row-vector map it is right multiplication by the inclusion
matrix of shape (binom(N, j), binom(N, n)).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Collection, Iterable, Sequence

import numpy as np

from .combinat import binom, rank_colex, subsets, subsets_of
from .f2linalg import (
    F2Subspace,
    as_f2,
    image_of,
    intersect_all,
    kernel_basis,
    matmul,
    rank,
    restrict_coords,
    subspace_intersect,
    subspace_sum,
)


class InexactWindowError(ValueError):
    """Raised when an operation needs Im = Ker on a window that lacks it."""


@dataclass(frozen=True, eq=False)
class BetaMatrix:
    N: int
    n: int
    j: int
    matrix: np.ndarray

    def dual_apply(self, f: np.ndarray) -> np.ndarray:
        f = as_f2(f)
        if f.shape != (self.matrix.shape[0],):
            raise ValueError(
                f"function of length {f.shape[0]} is not on level {self.j} of a {self.N}-window"
            )
        return matmul(f, self.matrix)


@lru_cache(maxsize=None)
def beta_matrix(N: int, n: int, j: int) -> BetaMatrix:
    """Inclusion matrix: entry (j-subset, n-subset) is 1 iff contained."""
    if not 0 <= j <= n <= N:
        raise ValueError(f"need 0 <= j <= n <= N, got N={N}, n={n}, j={j}")
    m = np.zeros((binom(N, j), binom(N, n)), dtype=np.uint8)
    for col, w in enumerate(subsets(n, N)):
        for x in combinations(w, j):
            m[rank_colex(x), col] = 1
    m.setflags(write=False)
    return BetaMatrix(N, n, j, m)


def beta_dual_apply(f: np.ndarray, N: int, n: int, j: int | None = None) -> np.ndarray:
    """Sum f (on j-subsets, default j = n-1) over the j-subsets of each n-subset."""
    if j is None:
        j = n - 1
    return beta_matrix(N, n, j).dual_apply(f)


def indicator(N: int, w: Sequence[int]) -> np.ndarray:
    v = np.zeros(binom(N, len(w)), dtype=np.uint8)
    v[rank_colex(tuple(sorted(w)))] = 1
    return v


def coords_of(A: Iterable[int], k: int) -> list[int]:
    """Colex ranks of the k-subsets of A."""
    return [rank_colex(w) for w in subsets_of(A, k)]


@dataclass(frozen=True)
class ExactnessCertificate:
    N: int
    n: int
    rank_lo: int
    rank_hi: int
    dim_mid: int
    exact: bool


@lru_cache(maxsize=None)
def exactness_check(N: int, n: int) -> ExactnessCertificate:
    """Compare the image of the (n-1 -> n) dual map with the kernel of (n -> n+1)."""
    if not 1 <= n < N:
        raise ValueError(f"need 1 <= n and n+1 <= N, got N={N}, n={n}")
    lo = beta_matrix(N, n, n - 1).matrix
    hi = beta_matrix(N, n + 1, n).matrix
    if matmul(lo, hi).any():
        raise AssertionError(f"composite of dual maps is nonzero at N={N}, n={n}")
    rank_lo, rank_hi = rank(lo), rank(hi)
    dim_mid = binom(N, n)
    return ExactnessCertificate(N, n, rank_lo, rank_hi, dim_mid, rank_lo + rank_hi == dim_mid)


def require_exact(N: int, n: int) -> ExactnessCertificate:
    cert = exactness_check(N, n)
    if not cert.exact:
        raise InexactWindowError(
            f"window N={N} is not exact at n={n} "
            f"(rank {cert.rank_lo} + {cert.rank_hi} != {cert.dim_mid})"
        )
    return cert


def smallest_exact_window(n: int, start: int, stop: int | None = None) -> int:
    """Smallest N >= start certified exact at n (and at n-1 when n >= 2)."""
    stop = stop if stop is not None else start + 16
    for N in range(max(start, n + 1), stop + 1):
        if exactness_check(N, n).exact and (n == 1 or exactness_check(N, n - 1).exact):
            return N
    raise InexactWindowError(f"no exact window for n={n} in [{start}, {stop}]")


@lru_cache(maxsize=None)
def image_module(N: int, n: int) -> F2Subspace:
    """Image of the dual map from level n-1 to level n."""
    m = beta_matrix(N, n, n - 1).matrix
    return F2Subspace.span(m, binom(N, n))


@lru_cache(maxsize=None)
def kernel_module(N: int, n: int) -> F2Subspace:
    """Kernel of the dual map from level n to level n+1."""
    return kernel_basis(beta_matrix(N, n + 1, n).matrix.T)


@lru_cache(maxsize=None)
def dual_kernel(N: int, n: int) -> F2Subspace:
    """Kernel of the dual map from level n-1 to level n, inside level n-1."""
    return kernel_basis(beta_matrix(N, n, n - 1).matrix.T)


def _norm(A: Collection[int]) -> frozenset[int]:
    return frozenset(A)


def v_BA_basis(N: int, n: int, A: Collection[int], B: Collection[int]) -> F2Subspace:
    """Functions on (n-1)-subsets supported on {w : w meets A exactly in B}."""
    A, B = _norm(A), _norm(B)
    if not B <= A:
        raise ValueError(f"{sorted(B)} is not a subset of {sorted(A)}")
    coords = [r for r, w in enumerate(subsets(n - 1, N)) if A.intersection(w) == B]
    return F2Subspace.coordinate(coords, binom(N, n - 1))


def _v_A_vanishing(N: int, n: int, A: frozenset[int]) -> F2Subspace:
    inside = set(coords_of(A, n - 1))
    coords = [r for r in range(binom(N, n - 1)) if r not in inside]
    return F2Subspace.coordinate(coords, binom(N, n - 1))


def _v_A_direct_sum(N: int, n: int, A: frozenset[int]) -> F2Subspace:
    total = F2Subspace.zero(binom(N, n - 1))
    for size in range(min(len(A), n - 2) + 1):
        for B in combinations(sorted(A), size):
            total = subspace_sum(total, v_BA_basis(N, n, A, B))
    return total


@lru_cache(maxsize=None)
def _v_A_cached(N: int, n: int, A: frozenset[int]) -> F2Subspace:
    vanishing = _v_A_vanishing(N, n, A)
    summed = _v_A_direct_sum(N, n, A)
    if vanishing != summed:
        raise AssertionError(f"two constructions of V_A disagree at N={N}, n={n}, A={sorted(A)}")
    return vanishing


def v_A_identity(N: int, n: int, A: Collection[int]) -> bool:
    """Vanishing description of V_A against the sum of the V_{B,A}, |B| < n-1."""
    A = _norm(A)
    return _v_A_vanishing(N, n, A) == _v_A_direct_sum(N, n, A)


def v_A_basis(N: int, n: int, A: Collection[int]) -> F2Subspace:
    """Functions on (n-1)-subsets vanishing on every (n-1)-subset of A.

    Built both as the sum of V_{B,A} over |B| < n-1 and as the vanishing
    condition; the two must agree.
    """
    return _v_A_cached(N, n, _norm(A))


@dataclass(frozen=True)
class DirectSumReport:
    dims: tuple[int, ...]
    sum_dim: int
    ambient: int
    holds: bool


def direct_sum_check(N: int, n: int, A: Collection[int]) -> DirectSumReport:
    """Whether the V_{B,A}, B a subset of A with |B| <= n-1, are independent and fill level n-1."""
    A = _norm(A)
    spaces = [
        v_BA_basis(N, n, A, B)
        for size in range(min(len(A), n - 1) + 1)
        for B in combinations(sorted(A), size)
    ]
    ambient = binom(N, n - 1)
    total = F2Subspace.zero(ambient)
    for s in spaces:
        total = subspace_sum(total, s)
    dims = tuple(s.dim for s in spaces)
    holds = sum(dims) == total.dim == ambient
    return DirectSumReport(dims, total.dim, ambient, holds)


def _vanish_on(N: int, k: int, A: Collection[int]) -> F2Subspace:
    """Level-k functions vanishing on [A]^k, as a coordinate subspace."""
    inside = set(coords_of(A, k))
    return F2Subspace.coordinate((r for r in range(binom(N, k)) if r not in inside), binom(N, k))


@lru_cache(maxsize=None)
def _w_A_cached(N: int, n: int, A: frozenset[int]) -> F2Subspace:
    require_exact(N, n)
    image = image_of(v_A_basis(N, n, A), beta_matrix(N, n, n - 1).matrix)
    described = subspace_intersect(image_module(N, n), _vanish_on(N, n, A))
    if image != described:
        raise AssertionError(f"two descriptions of W_A disagree at N={N}, n={n}, A={sorted(A)}")
    return image


def w_A_basis(N: int, n: int, A: Collection[int]) -> F2Subspace:
    """Image of V_A in level n; equal to the image-module members vanishing on [A]^n."""
    return _w_A_cached(N, n, _norm(A))


def in_image(N: int, n: int, g: np.ndarray) -> bool:
    """Membership in the image of the (n-1 -> n) dual map, by solving the system."""
    from .f2linalg import image_membership

    return image_membership(beta_matrix(N, n, n - 1).matrix.T, g) is not None


def w_A_membership(N: int, n: int, g: np.ndarray, A: Collection[int]) -> bool:
    require_exact(N, n)
    g = as_f2(g)
    return in_image(N, n, g) and not g[coords_of(A, n)].any()


def char_membership(N: int, n: int, f: np.ndarray, A: Collection[int]) -> bool:
    """Whether the dual image of f (level n-1) vanishes on [A]^n."""
    require_exact(N, n)
    g = beta_dual_apply(f, N, n)
    return not g[coords_of(A, n)].any()


def char_sides(N: int, n: int, A: Collection[int]) -> tuple[F2Subspace, F2Subspace]:
    """(V_A + kernel, {f : dual image vanishes on [A]^n}) at level n-1."""
    lhs = subspace_sum(v_A_basis(N, n, A), dual_kernel(N, n))
    cols = coords_of(A, n)
    m = beta_matrix(N, n, n - 1).matrix[:, cols]
    rhs = kernel_basis(m.T) if cols else F2Subspace.full(binom(N, n - 1))
    return lhs, rhs


def char_identity(N: int, n: int, A: Collection[int]) -> bool:
    lhs, rhs = char_sides(N, n, A)
    return lhs == rhs


def uniqueimage_identity(N: int, n: int, A: Collection[int]) -> bool:
    """Image of V_A against {g in image module : g vanishes on [A]^n}, both rebuilt here."""
    image = image_of(v_A_basis(N, n, A), beta_matrix(N, n, n - 1).matrix)
    described = subspace_intersect(image_module(N, n), _vanish_on(N, n, A))
    return image == described


@dataclass(frozen=True)
class AuxResult:
    holds: bool
    outside_hypothesis: bool
    lhs_dim: int
    rhs_dim: int


def aux_distributivity_check(N: int, n: int, families: Sequence[Collection[int]]) -> AuxResult:
    """Intersection of (V_{A_i} + K) against (intersection of V_{A_i}) + K.

    K is the kernel of the (n-1 -> n) dual map.  Families with k >= n are
    computed but flagged, since equality is only expected for k < n.
    """
    require_exact(N, n)
    ambient = binom(N, n - 1)
    k_space = dual_kernel(N, n)
    lhs = intersect_all([subspace_sum(v_A_basis(N, n, A), k_space) for A in families], ambient)
    rhs = subspace_sum(intersect_all([v_A_basis(N, n, A) for A in families], ambient), k_space)
    return AuxResult(lhs == rhs, len(families) >= n, lhs.dim, rhs.dim)


def restrict_to(sub: F2Subspace, N: int, n: int, A: Collection[int]) -> F2Subspace:
    """Project a level-n subspace onto the coordinates [A]^n."""
    return restrict_coords(sub, coords_of(A, n))
