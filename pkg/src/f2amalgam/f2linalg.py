"""Dense GF(2) linear algebra on uint8 numpy arrays.

Vectors are 1-D arrays of 0/1, matrices are 2-D arrays.  Rows are
eliminated with whole-row vectorized XOR.  Subspaces are kept in reduced
row echelon form with zero rows stripped, which makes the representation
canonical: two subspaces are equal iff their basis arrays are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


def as_f2(a) -> np.ndarray:
    return np.asarray(a, dtype=np.uint8) & 1


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product over GF(2)."""
    return (as_f2(a).astype(np.int64) @ as_f2(b).astype(np.int64) & 1).astype(np.uint8)


def _rref(m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    a = np.array(m, dtype=np.uint8, copy=True) & 1
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    n_rows, n_cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        hits = a[:, c].astype(bool)
        hits[r] = False
        a[hits] ^= a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def row_reduce(m: np.ndarray) -> tuple[np.ndarray, int]:
    """Reduced row echelon form and rank; zero rows end up at the bottom."""
    a, pivots = _rref(m)
    return a, len(pivots)


def rank(m: np.ndarray) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return len(_rref(m)[1])


@dataclass(frozen=True, eq=False)
class F2Subspace:
    """Subspace of GF(2)^ambient given by its canonical RREF basis."""

    basis: np.ndarray
    ambient: int

    def __post_init__(self) -> None:
        self.basis.setflags(write=False)

    @classmethod
    def span(cls, rows, ambient: int | None = None) -> "F2Subspace":
        rows = as_f2(rows)
        if rows.ndim == 1:
            rows = rows.reshape(1, -1) if rows.size else rows.reshape(0, ambient or 0)
        if ambient is None:
            ambient = rows.shape[1]
        if rows.shape[1] != ambient:
            raise ValueError(f"rows of length {rows.shape[1]} in ambient {ambient}")
        if rows.shape[0] == 0:
            return cls.zero(ambient)
        a, pivots = _rref(rows)
        return cls(a[: len(pivots)].copy(), ambient)

    @classmethod
    def zero(cls, ambient: int) -> "F2Subspace":
        return cls(np.zeros((0, ambient), dtype=np.uint8), ambient)

    @classmethod
    def full(cls, ambient: int) -> "F2Subspace":
        return cls(np.eye(ambient, dtype=np.uint8), ambient)

    @classmethod
    def coordinate(cls, coords: Iterable[int], ambient: int) -> "F2Subspace":
        """Span of the unit vectors at the given coordinates."""
        idx = sorted(set(coords))
        basis = np.zeros((len(idx), ambient), dtype=np.uint8)
        basis[np.arange(len(idx)), idx] = 1
        return cls(basis, ambient)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def order(self) -> int:
        return 2**self.dim

    @property
    def pivots(self) -> list[int]:
        return [int(np.flatnonzero(row)[0]) for row in self.basis]

    def contains(self, v) -> bool:
        v = as_f2(v)
        if v.shape != (self.ambient,):
            raise ValueError(f"vector of shape {v.shape} in ambient {self.ambient}")
        return not reduce_vector(v, self).any()

    def elements(self) -> np.ndarray:
        """All 2**dim members, one per row; only for small dimensions."""
        if self.dim > 20:
            raise ValueError(f"refusing to enumerate 2**{self.dim} vectors")
        coeffs = (np.arange(2**self.dim)[:, None] >> np.arange(self.dim)) & 1
        return matmul(coeffs, self.basis) if self.dim else np.zeros((1, self.ambient), np.uint8)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, F2Subspace):
            return NotImplemented
        return self.ambient == other.ambient and np.array_equal(self.basis, other.basis)

    def __hash__(self) -> int:
        return hash((self.ambient, self.basis.shape, self.basis.tobytes()))

    def __repr__(self) -> str:
        return f"F2Subspace(dim={self.dim}, ambient={self.ambient})"


def reduce_vector(v: np.ndarray, sub: F2Subspace) -> np.ndarray:
    """Reduce v modulo sub along its pivot columns."""
    out = as_f2(v).copy()
    for row, p in zip(sub.basis, sub.pivots):
        if out[p]:
            out ^= row
    return out


def coset_min(v: np.ndarray, sub: F2Subspace) -> np.ndarray:
    """The member of v + sub that is smallest read as sum(v[r] * 2**r)."""
    rev = F2Subspace.span(sub.basis[:, ::-1], sub.ambient) if sub.dim else sub
    return reduce_vector(as_f2(v)[::-1], rev)[::-1].copy()


def kernel_basis(m: np.ndarray) -> F2Subspace:
    """Right null space {x : m x = 0}."""
    m = as_f2(m)
    n_cols = m.shape[1]
    if m.shape[0] == 0:
        return F2Subspace.full(n_cols)
    a, pivots = _rref(m)
    free = [c for c in range(n_cols) if c not in set(pivots)]
    if not free:
        return F2Subspace.zero(n_cols)
    basis = np.zeros((len(free), n_cols), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, p in enumerate(pivots):
            if a[r, f]:
                basis[i, p] = 1
    return F2Subspace.span(basis, n_cols)


def image_membership(m: np.ndarray, v: np.ndarray) -> np.ndarray | None:
    """Some x with m x = v, or None when v is outside the column space."""
    m = as_f2(m)
    v = as_f2(v)
    if m.ndim != 2 or v.shape != (m.shape[0],):
        raise ValueError(f"dimension mismatch: matrix {m.shape}, vector {v.shape}")
    n_cols = m.shape[1]
    a, pivots = _rref(np.hstack([m, v.reshape(-1, 1)]))
    if pivots and pivots[-1] == n_cols:
        return None
    x = np.zeros(n_cols, dtype=np.uint8)
    for r, p in enumerate(pivots):
        x[p] = a[r, n_cols]
    return x


def solve_affine(m: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, F2Subspace] | None:
    """Solution set of m x = b as (particular solution, homogeneous space)."""
    x = image_membership(m, b)
    if x is None:
        return None
    return x, kernel_basis(m)


def inconsistency_certificate(m: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """A row combination y with y m = 0 and y b = 1, or None if m x = b is solvable."""
    m = as_f2(m)
    b = as_f2(b)
    left = kernel_basis(m.T)
    for y in left.basis:
        if int(y.astype(np.int64) @ b.astype(np.int64)) & 1:
            return y.copy()
    return None


def _check_ambient(a: F2Subspace, b: F2Subspace) -> None:
    if a.ambient != b.ambient:
        raise ValueError(f"ambient mismatch: {a.ambient} vs {b.ambient}")


def subspace_sum(a: F2Subspace, b: F2Subspace) -> F2Subspace:
    _check_ambient(a, b)
    return F2Subspace.span(np.vstack([a.basis, b.basis]), a.ambient)


def subspace_intersect(a: F2Subspace, b: F2Subspace) -> F2Subspace:
    """Intersection via the left kernel of the stacked bases."""
    _check_ambient(a, b)
    if a.dim == 0 or b.dim == 0:
        return F2Subspace.zero(a.ambient)
    stacked = np.vstack([a.basis, b.basis])
    relations = kernel_basis(stacked.T)
    if relations.dim == 0:
        return F2Subspace.zero(a.ambient)
    return F2Subspace.span(matmul(relations.basis[:, : a.dim], a.basis), a.ambient)


def intersect_all(spaces: Sequence[F2Subspace], ambient: int) -> F2Subspace:
    out = F2Subspace.full(ambient)
    for s in spaces:
        out = subspace_intersect(out, s)
    return out


def subspace_equal(a: F2Subspace, b: F2Subspace) -> bool:
    _check_ambient(a, b)
    return a == b


def restrict_coords(a: F2Subspace, coords: Iterable[int]) -> F2Subspace:
    """Image of a under projection onto the given coordinates (sorted)."""
    idx = sorted(set(coords))
    if idx and (idx[0] < 0 or idx[-1] >= a.ambient):
        raise IndexError(f"coordinates outside range({a.ambient})")
    return F2Subspace.span(a.basis[:, idx], len(idx))


def image_of(sub: F2Subspace, m: np.ndarray) -> F2Subspace:
    """Image of a row-vector subspace under x -> x m."""
    m = as_f2(m)
    if m.shape[0] != sub.ambient:
        raise ValueError(f"matrix with {m.shape[0]} rows applied in ambient {sub.ambient}")
    return F2Subspace.span(matmul(sub.basis, m), m.shape[1])
