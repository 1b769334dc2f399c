"""Finite-window model of the three-sorted structure and its automorphisms.

Points live in three sorts: ground elements, n-subsets, and fiber points
(n-subset, bit).  An automorphism is a pair (g, sigma) with sigma a
permutation of the window and g a cocycle on n-subsets taken from the
fiber module; it moves ground and n-set points by sigma and sends
Fiber(w, d) to Fiber(sigma(w), d + g(w)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import permutations
from typing import Collection, Iterable, Iterator, Sequence, Union

import numpy as np

from .combinat import GroundWindow, KSubset, binom, rank_colex, subsets, subsets_of
from .f2linalg import F2Subspace, as_f2, restrict_coords
from .permmod import (
    ExactnessCertificate,
    beta_matrix,
    coords_of,
    exactness_check,
    image_module,
    kernel_module,
    require_exact,
    w_A_basis,
)


@dataclass(frozen=True)
class Ground:
    c: int


@dataclass(frozen=True)
class NSet:
    w: KSubset


@dataclass(frozen=True)
class Fiber:
    w: KSubset
    delta: int

    def __post_init__(self) -> None:
        if self.delta not in (0, 1):
            raise ValueError(f"fiber bit must be 0 or 1, got {self.delta}")


SortedPoint = Union[Ground, NSet, Fiber]


def point_key(p: SortedPoint) -> tuple:
    if isinstance(p, Ground):
        return (0, (p.c,), 0)
    if isinstance(p, NSet):
        return (1, p.w[::-1], 0)
    return (2, p.w[::-1], p.delta)


def supp(points: Iterable[SortedPoint]) -> frozenset[int]:
    """Ground elements plus the elements of every n-set and fiber base."""
    out: set[int] = set()
    for p in points:
        if isinstance(p, Ground):
            out.add(p.c)
        else:
            out.update(p.w)
    return frozenset(out)


@lru_cache(maxsize=4096)
def perm_coords(sigma: tuple[int, ...], k: int) -> np.ndarray:
    """P with P[r] = colex rank of sigma applied to the r-th k-subset."""
    P = np.fromiter(
        (rank_colex(tuple(sorted(sigma[x] for x in w))) for w in subsets(k, len(sigma))),
        dtype=np.int64,
        count=binom(len(sigma), k),
    )
    P.setflags(write=False)
    return P


def extend_to_permutation(partial: dict[int, int], N: int) -> tuple[int, ...]:
    """Complete an injective partial map on range(N) to a permutation.

    Unassigned elements are matched to unused images in increasing order.
    """
    if len(set(partial.values())) != len(partial):
        raise ValueError(f"partial map is not injective: {partial}")
    rest_src = [x for x in range(N) if x not in partial]
    rest_dst = [y for y in range(N) if y not in set(partial.values())]
    full = dict(partial)
    full.update(zip(rest_src, rest_dst))
    return tuple(full[x] for x in range(N))


@dataclass(frozen=True, eq=False)
class WindowAutomorphism:
    """The pair (g, sigma); membership of g in the fiber module is checked by the model."""

    n: int
    g: np.ndarray
    sigma: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.sigma) != list(range(len(self.sigma))):
            raise ValueError(f"sigma is not a permutation: {self.sigma}")
        if self.g.shape != (binom(len(self.sigma), self.n),):
            raise ValueError(f"cocycle of shape {self.g.shape} on a {len(self.sigma)}-window")
        self.g.setflags(write=False)

    @classmethod
    def identity(cls, N: int, n: int) -> "WindowAutomorphism":
        return cls(n, np.zeros(binom(N, n), dtype=np.uint8), tuple(range(N)))

    @property
    def N(self) -> int:
        return len(self.sigma)

    def move(self, w: Iterable[int]) -> KSubset:
        return tuple(sorted(self.sigma[x] for x in w))

    def __call__(self, p: SortedPoint) -> SortedPoint:
        if isinstance(p, Ground):
            return Ground(self.sigma[p.c])
        if isinstance(p, NSet):
            return NSet(self.move(p.w))
        return Fiber(self.move(p.w), p.delta ^ int(self.g[rank_colex(p.w)]))

    def compose(self, other: "WindowAutomorphism") -> "WindowAutomorphism":
        """self after other."""
        sigma = tuple(self.sigma[other.sigma[x]] for x in range(self.N))
        g = other.g ^ self.g[perm_coords(other.sigma, self.n)]
        return WindowAutomorphism(self.n, g, sigma)

    def inverse(self) -> "WindowAutomorphism":
        inv = [0] * self.N
        for x, y in enumerate(self.sigma):
            inv[y] = x
        inv_t = tuple(inv)
        return WindowAutomorphism(self.n, self.g[perm_coords(inv_t, self.n)].copy(), inv_t)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WindowAutomorphism):
            return NotImplemented
        return (self.n, self.sigma) == (other.n, other.sigma) and np.array_equal(self.g, other.g)

    def __hash__(self) -> int:
        return hash((self.n, self.sigma, self.g.tobytes()))


@dataclass(frozen=True)
class ClosedSet:
    """cl(A): A, its n-subsets, and both fiber points over each n-subset."""

    support: frozenset[int]
    points: frozenset = field(repr=False)

    def __contains__(self, p: object) -> bool:
        return p in self.points

    def __len__(self) -> int:
        return len(self.points)

    def sorted_points(self) -> list[SortedPoint]:
        return sorted(self.points, key=point_key)


def closed_set(A: Collection[int], n: int) -> ClosedSet:
    A = frozenset(A)
    pts: list[SortedPoint] = [Ground(c) for c in A]
    for w in subsets_of(A, n):
        pts += [NSet(w), Fiber(w, 0), Fiber(w, 1)]
    return ClosedSet(A, frozenset(pts))


@dataclass(frozen=True)
class Stabilizer:
    module: F2Subspace
    moved: frozenset[int]


@dataclass(frozen=True)
class BruteForceReport:
    support: tuple[int, ...]
    fixing: int
    predicted: int
    matches: bool


class WindowModel:
    """The structure on a ground window, with the kernel form of the fiber module."""

    def __init__(self, window: GroundWindow | tuple[int, int]):
        if not isinstance(window, GroundWindow):
            window = GroundWindow(*window)
        self.window = window
        self.certificate: ExactnessCertificate = exactness_check(self.N, self.n)
        self.fiber_module: F2Subspace = kernel_module(self.N, self.n)
        if self.certificate.exact and self.fiber_module != image_module(self.N, self.n):
            raise AssertionError(f"certified window {self.N} but image != kernel")

    def __repr__(self) -> str:
        return f"WindowModel(N={self.N}, n={self.n}, exact={self.certificate.exact})"

    @property
    def N(self) -> int:
        return self.window.size

    @property
    def n(self) -> int:
        return self.window.arity

    @cached_property
    def image_module(self) -> F2Subspace:
        return image_module(self.N, self.n)

    def require_exact(self) -> None:
        require_exact(self.N, self.n)

    def automorphism(
        self, g: np.ndarray | None = None, sigma: Sequence[int] | None = None
    ) -> WindowAutomorphism:
        g = np.zeros(binom(self.N, self.n), dtype=np.uint8) if g is None else as_f2(g).copy()
        sigma = tuple(range(self.N)) if sigma is None else tuple(sigma)
        if len(sigma) != self.N:
            raise ValueError(f"permutation of length {len(sigma)} on a {self.N}-window")
        if not self.fiber_module.contains(g):
            raise ValueError("cocycle is not in the fiber module")
        return WindowAutomorphism(self.n, g, sigma)

    def identity(self) -> WindowAutomorphism:
        return WindowAutomorphism.identity(self.N, self.n)

    def aut_apply(self, a: WindowAutomorphism, p: SortedPoint) -> SortedPoint:
        return a(p)

    def all_points(self) -> list[SortedPoint]:
        return closed_set(range(self.N), self.n).sorted_points()

    def cl(self, A: Collection[int]) -> ClosedSet:
        A = frozenset(A)
        if any(not 0 <= c < self.N for c in A):
            raise ValueError(f"{sorted(A)} is not inside the window of size {self.N}")
        return closed_set(A, self.n)

    def closure(self, points: Iterable[SortedPoint]) -> ClosedSet:
        return self.cl(supp(points))

    def nset_coords(self, A: Collection[int]) -> list[int]:
        return coords_of(A, self.n)

    def fixes_pointwise(self, a: WindowAutomorphism, points: Iterable[SortedPoint]) -> bool:
        return all(a(p) == p for p in points)

    def pointwise_stabilizer(self, A: Collection[int]) -> Stabilizer:
        """Cocycles and ground elements allowed by automorphisms fixing cl(A) pointwise."""
        self.require_exact()
        A = frozenset(A)
        return Stabilizer(w_A_basis(self.N, self.n, A), frozenset(range(self.N)) - A)

    def in_stabilizer(self, a: WindowAutomorphism, A: Collection[int]) -> bool:
        stab = self.pointwise_stabilizer(A)
        return all(a.sigma[c] == c for c in A) and stab.module.contains(a.g)

    def stabilizer_brute_force(self, A: Collection[int]) -> BruteForceReport:
        """Enumerate every (g, sigma) and compare the fixers of cl(A) with the formula."""
        self.require_exact()
        A = frozenset(A)
        pts = self.cl(A).sorted_points()
        sorts_01 = [p for p in pts if not isinstance(p, Fiber)]
        fibers = [p for p in pts if isinstance(p, Fiber)]
        fiber_rank = np.array([rank_colex(p.w) for p in fibers], dtype=np.int64)
        stab = self.pointwise_stabilizer(A)
        cocycles = self.fiber_module.elements()
        in_module = np.array([stab.module.contains(g) for g in cocycles], dtype=bool)
        zero = np.zeros(binom(self.N, self.n), dtype=np.uint8)
        fixing = predicted = 0
        agree = True
        for sigma in permutations(range(self.N)):
            bare = WindowAutomorphism(self.n, zero, sigma)
            # ground and n-set images do not depend on g
            if self.fixes_pointwise(bare, sorts_01) and all(bare(p).w == p.w for p in fibers):
                # Fiber(w, d) -> Fiber(w, d + g(w)) for every cocycle at once
                lit = ~cocycles[:, fiber_rank].any(axis=1) if fibers else np.ones(len(cocycles), bool)
            else:
                lit = np.zeros(len(cocycles), dtype=bool)
            pred = in_module & all(sigma[c] == c for c in A)
            fixing += int(lit.sum())
            predicted += int(pred.sum())
            agree &= bool(np.array_equal(lit, pred))
        return BruteForceReport(tuple(sorted(A)), fixing, predicted, agree)

    def induced_fiber_group(self, module: F2Subspace, A: Collection[int]) -> F2Subspace:
        """Shift vectors the module induces on the fibers over [A]^n."""
        if module.ambient != binom(self.N, self.n):
            raise ValueError("module is not at level n of this window")
        return restrict_coords(module, self.nset_coords(A))

    def window_restriction_check(self, A: Collection[int]) -> bool:
        """Image module restricted to [A]^n against the image module of A alone."""
        A_sorted = sorted(A)
        if len(A_sorted) < self.n:
            raise ValueError(f"|A| = {len(A_sorted)} < n = {self.n}")
        restricted = self.induced_fiber_group(self.image_module, A_sorted)
        local = beta_matrix(len(A_sorted), self.n, self.n - 1).matrix
        # columns of the local matrix are n-subsets of range(|A|); relabel into A
        global_cols = self.nset_coords(A_sorted)
        position = {r: i for i, r in enumerate(global_cols)}
        transported = np.zeros((local.shape[0], len(global_cols)), dtype=np.uint8)
        for col, w in enumerate(subsets(self.n, len(A_sorted))):
            target = rank_colex(tuple(A_sorted[x] for x in w))
            transported[:, position[target]] = local[:, col]
        return restricted == F2Subspace.span(transported, len(global_cols))

    def random_automorphism(self, rng: np.random.Generator) -> WindowAutomorphism:
        coeffs = rng.integers(0, 2, size=self.fiber_module.dim, dtype=np.uint8)
        g = (coeffs.astype(np.int64) @ self.fiber_module.basis.astype(np.int64) & 1).astype(np.uint8)
        sigma = tuple(int(x) for x in rng.permutation(self.N))
        return WindowAutomorphism(self.n, g, sigma)

    def iter_automorphisms(self, sigmas: Iterable[Sequence[int]] | None = None) -> Iterator[WindowAutomorphism]:
        cocycles = self.fiber_module.elements()
        for sigma in sigmas if sigmas is not None else permutations(range(self.N)):
            for g in cocycles:
                yield WindowAutomorphism(self.n, g.copy(), tuple(sigma))
