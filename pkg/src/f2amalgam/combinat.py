"""Colex ranking of k-subsets of the ground window 0..N-1.

Every vector in the package is indexed by k-subsets in colexicographic
order, so these helpers fix the coordinate system.  Colex rank does not
depend on N: enlarging the window only appends new coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Tuple

KSubset = Tuple[int, ...]

_MAX_INDEX = 2**63 - 1


def binom(n: int, k: int) -> int:
    """Binomial coefficient, 0 when k > n; OverflowError past int64."""
    if n < 0 or k < 0:
        raise ValueError(f"binom needs nonnegative arguments, got ({n}, {k})")
    value = math.comb(n, k)
    if value > _MAX_INDEX:
        raise OverflowError(f"binom({n}, {k}) exceeds the 64-bit index range")
    return value


def ksubset(elements: Iterable[int], N: int | None = None) -> KSubset:
    """Normalize an iterable of ground elements to a sorted tuple."""
    w = tuple(sorted(elements))
    if len(set(w)) != len(w):
        raise ValueError(f"repeated element in {w}")
    if w and w[0] < 0:
        raise ValueError(f"negative element in {w}")
    if N is not None and w and w[-1] >= N:
        raise ValueError(f"{w} is not a subset of range({N})")
    return w


def rank_colex(w: KSubset) -> int:
    """Colex rank of a strictly increasing tuple."""
    return sum(math.comb(c, i + 1) for i, c in enumerate(w))


def unrank_colex(r: int, k: int, N: int) -> KSubset:
    """Inverse of :func:`rank_colex` on k-subsets of range(N)."""
    total = binom(N, k)
    if not 0 <= r < total:
        raise ValueError(f"rank {r} out of range for binom({N}, {k}) = {total}")
    out = []
    c = N
    for i in range(k, 0, -1):
        c -= 1
        while math.comb(c, i) > r:
            c -= 1
        out.append(c)
        r -= math.comb(c, i)
    return tuple(reversed(out))


def iter_colex(k: int, N: int) -> Iterator[KSubset]:
    """All k-subsets of range(N) in colex order."""
    return iter(subsets(k, N))


@lru_cache(maxsize=None)
def subsets(k: int, N: int) -> tuple[KSubset, ...]:
    return tuple(sorted(combinations(range(N), k), key=lambda w: w[::-1]))


def subsets_of(A: Iterable[int], k: int) -> list[KSubset]:
    """k-subsets of A, in colex order of the ambient window."""
    return sorted(combinations(sorted(A), k), key=lambda w: w[::-1])


def is_colex_increasing(seq: Iterable[KSubset]) -> bool:
    prev = None
    for w in seq:
        if prev is not None and not prev[::-1] < w[::-1]:
            return False
        prev = w
    return True


@dataclass(frozen=True)
class GroundWindow:
    """Finite truncation {0, ..., size-1} of the ground set, with arity n."""

    size: int
    arity: int

    def __post_init__(self) -> None:
        if self.arity < 2:
            raise ValueError(f"arity must be >= 2, got {self.arity}")
        if self.size < self.arity + 2:
            raise ValueError(
                f"window size {self.size} too small for arity {self.arity} (need >= n+2)"
            )

    @property
    def elements(self) -> range:
        return range(self.size)

    def dim(self, k: int) -> int:
        return binom(self.size, k)

    def subsets(self, k: int) -> tuple[KSubset, ...]:
        return subsets(k, self.size)
