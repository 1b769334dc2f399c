"""The relational presentation: membership E, the parity relation P, projection pi.

A tuple of n+1 fiber points ((w_1, d_1), ..., (w_{n+1}, d_{n+1})) is in P
when the w_i are the n+1 distinct n-subsets of one (n+1)-set and the d_i
sum to zero.  Membership is decided from this condition; P is only listed
for small windows.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations, product
from typing import Iterator, Sequence

import numpy as np

from .combinat import binom, rank_colex, subsets
from .f2linalg import F2Subspace, kernel_basis
from .mstruct import Fiber, Ground, NSet, WindowAutomorphism
from .permmod import beta_matrix, exactness_check, image_module, kernel_module

MAX_LISTED_WINDOW = 8


class RelationalModel:
    def __init__(self, N: int, n: int):
        if n < 1 or N < n + 1:
            raise ValueError(f"need n >= 1 and N >= n+1, got N={N}, n={n}")
        self.N, self.n = N, n

    def E(self, c: int, w: Sequence[int]) -> bool:
        return c in w

    def pi(self, p: Fiber) -> NSet:
        return NSet(p.w)

    def in_P(self, pts: Sequence[Fiber]) -> bool:
        if len(pts) != self.n + 1 or not all(isinstance(p, Fiber) for p in pts):
            return False
        ws = {p.w for p in pts}
        union = set().union(*ws)
        # n+1 distinct n-subsets of an (n+1)-set are exactly its complements of points
        return len(ws) == self.n + 1 and len(union) == self.n + 1 and sum(p.delta for p in pts) % 2 == 0

    def iter_P(self) -> Iterator[tuple[Fiber, ...]]:
        """P-tuples in canonical order: w_i drops the i-th smallest element."""
        if self.N > MAX_LISTED_WINDOW:
            raise ValueError(f"P is not listed for windows above {MAX_LISTED_WINDOW}")
        for C in subsets(self.n + 1, self.N):
            faces = [tuple(x for x in C if x != c) for c in C]
            for head in product((0, 1), repeat=self.n):
                deltas = head + (sum(head) % 2,)
                yield tuple(Fiber(w, d) for w, d in zip(faces, deltas))

    def preserves(self, a: WindowAutomorphism, tuples: Sequence[tuple[Fiber, ...]] | None = None) -> bool:
        """Whether a maps every listed P-tuple into P.

        On a finite window a bijection of fiber points that maps P into P
        maps P onto P, so this also covers the complement.
        """
        tuples = list(self.iter_P()) if tuples is None else tuples
        return all(self.in_P(tuple(a(p) for p in t)) for t in tuples)

    def preserves_E_pi(self, a: WindowAutomorphism) -> bool:
        for w in subsets(self.n, self.N):
            moved = a(NSet(w)).w
            if any(self.E(a(Ground(c)).c, moved) != self.E(c, w) for c in range(self.N)):
                return False
            if any(self.pi(a(Fiber(w, d))) != a(NSet(w)) for d in (0, 1)):
                return False
        return True


def p_relation_matrix(N: int, n: int) -> np.ndarray:
    """Rows indexed by (n+1)-subsets, with ones at their n-subsets."""
    if N < n + 1:
        raise ValueError(f"need N >= n+1, got N={N}, n={n}")
    m = np.zeros((binom(N, n + 1), binom(N, n)), dtype=np.uint8)
    for r, C in enumerate(subsets(n + 1, N)):
        for face in combinations(C, n):
            m[r, rank_colex(face)] = 1
    return m


@dataclass(frozen=True)
class CoincideReport:
    N: int
    n: int
    ker_mu_dim: int
    ker_beta_dim: int
    equal: bool
    im_contained: bool
    im_equal: bool


def ker_mu(N: int, n: int) -> F2Subspace:
    """Cocycles f with f(w_1) + ... + f(w_{n+1}) = 0 over every P-configuration."""
    return kernel_basis(p_relation_matrix(N, n))


def coincide_check(N: int, n: int) -> CoincideReport:
    m = p_relation_matrix(N, n)
    if not np.array_equal(m, beta_matrix(N, n + 1, n).matrix.T):
        raise AssertionError(f"P-relation matrix drifted from the inclusion matrix at N={N}, n={n}")
    mu = ker_mu(N, n)
    beta = kernel_module(N, n)
    if mu != beta:
        raise AssertionError(f"Ker mu differs from the dual kernel at N={N}, n={n}")
    im = image_module(N, n)
    contained = all(mu.contains(v) for v in im.basis)
    im_equal = contained and im.dim == mu.dim
    if n < N - 1 and im_equal != exactness_check(N, n).exact:
        raise AssertionError("image equality disagrees with the exactness certificate")
    return CoincideReport(N, n, mu.dim, beta.dim, True, contained, im_equal)


@dataclass(frozen=True)
class PreservationReport:
    N: int
    n: int
    sym_preserves: bool
    kernel_preserves: bool
    automorphisms_checked: int
    preserving_cocycles: int
    converse_holds: bool


def preservation_brute_force(N: int, n: int) -> PreservationReport:
    """Exhaustive relation-preservation checks on a small window.

    Every permutation must preserve E, P and pi; every (g, sigma) with g in
    the dual kernel must preserve P; among all 2**binom(N, n) cocycles g,
    (g, id) preserves P exactly for the members of the dual kernel.
    """
    if N > 6:
        raise ValueError(f"exhaustive preservation is limited to N <= 6, got {N}")
    model = RelationalModel(N, n)
    tuples = list(model.iter_P())
    zero = np.zeros(binom(N, n), dtype=np.uint8)
    sigmas = list(permutations(range(N)))
    sym_ok = all(
        model.preserves_E_pi(a) and model.preserves(a, tuples)
        for a in (WindowAutomorphism(n, zero, s) for s in sigmas)
    )
    kernel = kernel_module(N, n)
    checked = 0
    kernel_ok = True
    for g in kernel.elements():
        for s in sigmas:
            checked += 1
            if not model.preserves(WindowAutomorphism(n, g.copy(), s), tuples):
                kernel_ok = False
    width = binom(N, n)
    if width > 16:
        raise ValueError(f"2**{width} cocycles are too many to enumerate")
    ident = tuple(range(N))
    preserving = []
    for bits in range(1 << width):
        g = ((bits >> np.arange(width)) & 1).astype(np.uint8)
        if model.preserves(WindowAutomorphism(n, g, ident), tuples):
            preserving.append(g)
    converse = len(preserving) == kernel.order and all(kernel.contains(g) for g in preserving)
    return PreservationReport(N, n, sym_ok, kernel_ok, checked, len(preserving), converse)


def sample_preservation(N: int, n: int, rng: np.random.Generator, samples: int = 50) -> bool:
    """Random permutations and kernel cocycles against random P-tuples, for larger windows."""
    model = RelationalModel(N, n)
    kernel = kernel_module(N, n)
    for _ in range(samples):
        coeffs = rng.integers(0, 2, size=kernel.dim)
        g = (coeffs @ kernel.basis.astype(np.int64) & 1).astype(np.uint8)
        a = WindowAutomorphism(n, g, tuple(int(x) for x in rng.permutation(N)))
        C = sorted(int(x) for x in rng.choice(N, size=n + 1, replace=False))
        head = [int(x) for x in rng.integers(0, 2, size=n)]
        deltas = head + [sum(head) % 2]
        order = rng.permutation(n + 1)
        t = tuple(Fiber(tuple(x for x in C if x != C[i]), deltas[i]) for i in order)
        if not (model.in_P(t) and model.in_P(tuple(a(p) for p in t)) and model.preserves_E_pi(a)):
            return False
    return True
