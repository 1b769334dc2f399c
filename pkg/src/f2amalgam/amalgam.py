"""Amalgamation problems over the proper subsets of {0, ..., k-1}.

Index sets are frozensets of 0-based indices.  A problem assigns to each
proper index set s the closed set over the union of the base supports in
s, and to each pair s <= t an embedding carried by a window automorphism.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Collection, Iterable, Sequence

import numpy as np

from .combinat import binom, rank_colex, subsets_of
from .f2linalg import F2Subspace, coset_min, inconsistency_certificate, intersect_all, matmul, solve_affine
from .mstruct import (
    ClosedSet,
    SortedPoint,
    WindowAutomorphism,
    WindowModel,
    extend_to_permutation,
)
from .permmod import beta_dual_apply, indicator, w_A_basis

log = logging.getLogger(__name__)


def index_sets(k: int, proper: bool = True) -> list[frozenset[int]]:
    """Subsets of range(k) ordered by size, then lexicographically."""
    top = k - 1 if proper else k
    return [frozenset(c) for m in range(top + 1) for c in combinations(range(k), m)]


def singletons(k: int, start: int = 0) -> list[frozenset[int]]:
    return [frozenset({start + i}) for i in range(k)]


class ProblemError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Embedding:
    """The restriction of ``carrier`` to ``domain``, landing in ``codomain``."""

    domain: ClosedSet
    codomain: ClosedSet
    carrier: WindowAutomorphism

    def __call__(self, p: SortedPoint) -> SortedPoint:
        if p not in self.domain:
            raise KeyError(f"{p} is not in the domain")
        return self.carrier(p)

    def image(self) -> frozenset:
        return frozenset(self.carrier(p) for p in self.domain.points)

    def is_valid(self) -> bool:
        return self.image() <= self.codomain.points

    def then(self, after: "Embedding") -> "Embedding":
        """``after`` composed with self."""
        return Embedding(self.domain, after.codomain, after.carrier.compose(self.carrier))

    def agrees_with(self, other: "Embedding") -> bool:
        return all(self.carrier(p) == other.carrier(p) for p in self.domain.points)


@dataclass(frozen=True)
class Twist:
    source: frozenset[int]
    target: frozenset[int]
    carrier: WindowAutomorphism


@dataclass(frozen=True)
class Violation:
    condition: str
    detail: str


@dataclass(frozen=True, eq=False)
class AmalgamationProblem:
    model: WindowModel
    supports: tuple[frozenset[int], ...]
    nodes: dict
    transitions: dict
    twist: tuple[frozenset[int], frozenset[int]] | None = None

    @property
    def k(self) -> int:
        return len(self.supports)

    @property
    def full(self) -> frozenset[int]:
        return frozenset(range(self.k))

    @property
    def union(self) -> frozenset[int]:
        return frozenset().union(*self.supports)

    def support_of(self, s: Iterable[int]) -> frozenset[int]:
        return frozenset().union(*(self.supports[i] for i in s))

    def transition(self, s: Iterable[int], t: Iterable[int]) -> Embedding:
        return self.transitions[(frozenset(s), frozenset(t))]

    def with_transition(self, s, t, carrier: WindowAutomorphism) -> "AmalgamationProblem":
        """Copy with one transition replaced; not validated."""
        s, t = frozenset(s), frozenset(t)
        trans = dict(self.transitions)
        trans[(s, t)] = Embedding(self.nodes[s], self.nodes[t], carrier)
        return AmalgamationProblem(self.model, self.supports, self.nodes, trans, self.twist)


def _check_supports(model: WindowModel, supports: Sequence[Collection[int]]) -> tuple[frozenset[int], ...]:
    out = tuple(frozenset(A) for A in supports)
    for i, A in enumerate(out):
        if not A:
            raise ProblemError(f"support {i} is empty")
        if any(not 0 <= c < model.N for c in A):
            raise ProblemError(f"support {sorted(A)} leaves the window of size {model.N}")
    for (i, A), (j, B) in combinations(enumerate(out), 2):
        if A & B:
            raise ProblemError(f"supports {i} and {j} overlap in {sorted(A & B)}")
    return out


def default_twist(model: WindowModel, supports: Sequence[frozenset[int]]) -> Twist:
    """Cocycle dual to the indicator of one (n-1)-set, on the edge {0..n-1} -> {0..n}."""
    n = model.n
    if len(supports) != n + 2:
        raise ProblemError(f"the default twist needs k = n+2 = {n + 2}, got k = {len(supports)}")
    D = sorted(min(A) for A in supports[: n - 1])
    g = beta_dual_apply(indicator(model.N, D), model.N, n)
    return Twist(frozenset(range(n)), frozenset(range(n + 1)), model.automorphism(g))


def build_standard_problem(
    model: WindowModel,
    supports: Sequence[Collection[int]],
    twist: Twist | bool | None = None,
) -> AmalgamationProblem:
    """Nodes cl(union of supports), inclusion transitions, and at most one twisted edge."""
    sup = _check_supports(model, supports)
    k = len(sup)
    if k < 1:
        raise ProblemError("need at least one support")
    if twist is True:
        twist = default_twist(model, sup)
    elif twist is False:
        twist = None
    sets = index_sets(k)
    nodes = {s: model.cl(frozenset().union(*(sup[i] for i in s))) for s in sets}
    ident = model.identity()
    transitions = {}
    for t in sets:
        for m in range(len(t) + 1):
            for s in map(frozenset, combinations(sorted(t), m)):
                carrier = ident
                if twist is not None and (s, t) == (twist.source, twist.target):
                    carrier = twist.carrier
                transitions[(s, t)] = Embedding(nodes[s], nodes[t], carrier)
    if twist is not None and (twist.source, twist.target) not in transitions:
        raise ProblemError("twisted edge is not a pair of proper index sets")
    problem = AmalgamationProblem(
        model, sup, nodes, transitions, None if twist is None else (twist.source, twist.target)
    )
    bad = validate_problem(problem)
    if bad:
        raise ProblemError("; ".join(f"{v.condition}: {v.detail}" for v in bad[:5]))
    return problem


def validate_problem(p: AmalgamationProblem) -> list[Violation]:
    """Base, independence, generation, embedding and functoriality violations."""
    out: list[Violation] = []
    sets = index_sets(p.k)
    empty = frozenset()
    if p.nodes[empty].support or p.nodes[empty].points:
        out.append(Violation("base", f"base node has support {sorted(p.nodes[empty].support)}"))
    for s in sets:
        node = p.nodes[s]
        gen = frozenset().union(*(p.nodes[frozenset({i})].support for i in s))
        if node.support != gen or node != p.model.cl(gen):
            out.append(Violation("generation", f"node {sorted(s)} is not the closure of its base supports"))
    for i, A in enumerate(p.supports):
        if p.nodes[frozenset({i})].support != A:
            out.append(Violation("generation", f"node {{{i}}} does not carry support {sorted(A)}"))
    for s1, s2 in combinations(sets, 2):
        lhs = p.nodes[s1].support & p.nodes[s2].support
        if lhs != p.nodes[s1 & s2].support:
            out.append(Violation("independence", f"supports of {sorted(s1)} and {sorted(s2)} meet outside {sorted(s1 & s2)}"))
    for (s, t), e in p.transitions.items():
        if e.domain != p.nodes[s] or e.codomain != p.nodes[t]:
            out.append(Violation("embedding", f"{sorted(s)}->{sorted(t)} has the wrong endpoints"))
        elif not e.is_valid():
            out.append(Violation("embedding", f"{sorted(s)}->{sorted(t)} leaves its codomain"))
        elif s == t and any(e.carrier(x) != x for x in e.domain.points):
            out.append(Violation("functoriality", f"identity transition on {sorted(s)} moves points"))
    for s3 in sets:
        for m2 in range(len(s3) + 1):
            for s2 in map(frozenset, combinations(sorted(s3), m2)):
                for m1 in range(m2 + 1):
                    for s1 in map(frozenset, combinations(sorted(s2), m1)):
                        a12 = p.transitions[(s1, s2)].carrier
                        a23 = p.transitions[(s2, s3)].carrier
                        a13 = p.transitions[(s1, s3)].carrier
                        if any(a23(a12(x)) != a13(x) for x in p.nodes[s1].points):
                            out.append(
                                Violation(
                                    "functoriality",
                                    f"{sorted(s1)}->{sorted(s2)}->{sorted(s3)} does not commute",
                                )
                            )
    return out


@dataclass(frozen=True, eq=False)
class Solution:
    top: ClosedSet
    maps: dict
    extension: dict | None = None
    trace: tuple = field(default=(), compare=False)


def verify_solution(p: AmalgamationProblem, sol: Solution) -> list[Violation]:
    """Check every compatibility equation pointwise on every node."""
    out: list[Violation] = []
    full = p.full
    for i in range(p.k):
        x = sol.maps[i]
        if x.domain != p.nodes[full - {i}] or x.codomain != sol.top:
            out.append(Violation("embedding", f"x_{i} has the wrong endpoints"))
        elif not x.is_valid():
            out.append(Violation("embedding", f"x_{i} leaves the top node"))
    image_support = frozenset().union(*(_ground_image(e) for e in sol.maps.values()))
    if image_support != sol.top.support or sol.top != p.model.cl(image_support):
        out.append(Violation("generation", "top node is not generated by the images"))
    for i, j in combinations(range(p.k), 2):
        rest = sorted(full - {i, j})
        for m in range(len(rest) + 1):
            for s in map(frozenset, combinations(rest, m)):
                ai, aj = p.transitions[(s, full - {i})], p.transitions[(s, full - {j})]
                for pt in p.nodes[s].sorted_points():
                    if sol.maps[i](ai(pt)) != sol.maps[j](aj(pt)):
                        out.append(Violation("compatibility", f"x_{i}, x_{j} disagree on {pt} from {sorted(s)}"))
                        break
    return out


def _ground_image(e: Embedding) -> frozenset[int]:
    return frozenset(e.carrier.sigma[c] for c in e.domain.support)


# ---------------------------------------------------------------- uniqueness


@dataclass(frozen=True)
class GapResult:
    n: int
    k: int
    N: int
    order_constrained: int
    order_free: int
    unique: bool
    constrained: F2Subspace = field(repr=False)
    free: F2Subspace = field(repr=False)


def uniqueness_gap(model: WindowModel, k: int, supports: Sequence[Collection[int]]) -> GapResult:
    """Groups induced on the fibers over [A]^n, A the union of the first k-1 supports.

    ``constrained`` comes from cocycles vanishing on the closures of
    (A plus A_k) minus A_i, ``free`` from those vanishing on A minus A_i;
    k-uniqueness for this problem holds iff the two induced groups agree.
    """
    model.require_exact()
    if k < 2 or len(supports) < k:
        raise ValueError(f"need 2 <= k <= {len(supports)}, got k = {k}")
    sup = _check_supports(model, supports[:k])
    A = frozenset().union(*sup[:-1])
    last = sup[-1]
    N, n = model.N, model.n
    ambient = binom(N, n)
    W1 = intersect_all([w_A_basis(N, n, (A | last) - Ai) for Ai in sup[:-1]], ambient)
    W2 = intersect_all([w_A_basis(N, n, A - Ai) for Ai in sup[:-1]], ambient)
    R1 = model.induced_fiber_group(W1, A)
    R2 = model.induced_fiber_group(W2, A)
    if not R2.dim >= R1.dim:
        raise AssertionError("constrained group is larger than the free group")
    return GapResult(n, k, N, R1.order, R2.order, R1 == R2, R1, R2)


# ----------------------------------------------------------------- existence


def _ground_placement(p: AmalgamationProblem) -> dict[int, tuple[int, ...]]:
    """sigma_i sending the image of each base element in node [k]-i back to itself."""
    full = p.full
    out = {}
    for i in range(p.k):
        partial: dict[int, int] = {}
        for l in sorted(full - {i}):
            rho = p.transitions[(frozenset({l}), full - {i})].carrier
            for c in p.supports[l]:
                partial[rho.sigma[c]] = c
        if frozenset(partial) != p.nodes[full - {i}].support:
            raise AssertionError(f"node {sorted(full - {i})} is not covered by its base images")
        out[i] = extend_to_permutation(partial, p.model.N)
    for i, j in combinations(range(p.k), 2):
        s = full - {i, j}
        ti, tj = p.transitions[(s, full - {i})].carrier, p.transitions[(s, full - {j})].carrier
        for c in p.nodes[s].support:
            if out[i][ti.sigma[c]] != out[j][tj.sigma[c]]:
                raise AssertionError("ground compatibility fails for a validated problem")
    return out


@dataclass(frozen=True, eq=False)
class FiberSystem:
    """Unknowns: k blocks of coefficients over a basis of the fiber module."""

    matrix: np.ndarray
    rhs: np.ndarray
    block: int
    k: int
    labels: tuple


def existence_system(p: AmalgamationProblem) -> FiberSystem:
    """Linear equations g_i(tau_i w) + g_j(tau_j w) = h_i(w) + h_j(w) over all pairs."""
    model = p.model
    K = model.fiber_module.basis
    d = K.shape[0]
    full = p.full
    rows, rhs, labels = [], [], []
    for i, j in combinations(range(p.k), 2):
        s = full - {i, j}
        ti, tj = p.transitions[(s, full - {i})].carrier, p.transitions[(s, full - {j})].carrier
        for w in subsets_of(p.nodes[s].support, model.n):
            r = rank_colex(w)
            row = np.zeros(p.k * d, dtype=np.uint8)
            row[i * d : (i + 1) * d] ^= K[:, rank_colex(ti.move(w))]
            row[j * d : (j + 1) * d] ^= K[:, rank_colex(tj.move(w))]
            rows.append(row)
            rhs.append(int(ti.g[r]) ^ int(tj.g[r]))
            labels.append((i, j, w))
    matrix = np.array(rows, dtype=np.uint8).reshape(len(rows), p.k * d)
    return FiberSystem(matrix, np.array(rhs, dtype=np.uint8), d, p.k, tuple(labels))


def solve_existence(p: AmalgamationProblem, cross_check: bool = False) -> Solution | None:
    """Decide existence by the ground placement plus one GF(2) system for the cocycles."""
    bad = validate_problem(p)
    if bad:
        raise ProblemError(f"invalid problem: {bad[0].condition}: {bad[0].detail}")
    model = p.model
    model.require_exact()
    sigmas = _ground_placement(p)
    system = existence_system(p)
    solved = solve_affine(system.matrix, system.rhs) if system.matrix.shape[0] else (
        np.zeros(system.matrix.shape[1], dtype=np.uint8),
        None,
    )
    sol = None
    if solved is not None:
        x = solved[0]
        K = model.fiber_module.basis
        d = system.block
        top = model.cl(p.union)
        maps = {}
        for i in range(p.k):
            g = matmul(x[i * d : (i + 1) * d], K) if d else np.zeros(K.shape[1], dtype=np.uint8)
            maps[i] = Embedding(p.nodes[p.full - {i}], top, model.automorphism(g, sigmas[i]))
        sol = Solution(top, maps)
        bad = verify_solution(p, sol)
        if bad:
            raise AssertionError(f"linear solution fails verification: {bad[0].detail}")
    if cross_check:
        brute = search_existence(p)
        if (brute is None) != (sol is None):
            raise AssertionError("exhaustive search disagrees with the linear decider")
    return sol


def search_existence(p: AmalgamationProblem, max_window: int = 7) -> Solution | None:
    """Exhaustive search over maps restricted from (g, sigma), sigma permuting the union.

    Every candidate x_i is the restriction to node [k]-i of some g in the
    fiber module and some permutation of the union support; pairs are
    compared on the literal images of every point of the shared node.
    """
    model = p.model
    if model.N > max_window:
        raise ValueError(f"exhaustive search limited to windows N <= {max_window}")
    full = p.full
    U = sorted(p.union)
    top = model.cl(U)
    cocycles = model.fiber_module.elements()
    cands: dict[int, list[WindowAutomorphism]] = {}
    for i in range(p.k):
        node = p.nodes[full - {i}]
        dom = sorted(node.support)
        coords = [rank_colex(w) for w in subsets_of(dom, model.n)]
        reps: dict[bytes, np.ndarray] = {}
        for g in cocycles:
            reps.setdefault(g[coords].tobytes(), g)
        cands[i] = []
        for img in permutations(U, len(dom)):
            sigma = extend_to_permutation(dict(zip(dom, img)), model.N)
            for g in reps.values():
                cands[i].append(WindowAutomorphism(model.n, g.copy(), sigma))
    # signature of candidate c for i on pair (i, j): images of the shared node
    sig: dict[tuple[int, int], list[tuple]] = {}
    for i, j in permutations(range(p.k), 2):
        s = full - {i, j}
        ai = p.transitions[(s, full - {i})]
        pts = [ai(pt) for pt in p.nodes[s].sorted_points()]
        sig[(i, j)] = [tuple(c(q) for q in pts) for c in cands[i]]

    # candidates of i matching a given signature of j on the pair (i, j)
    index: dict[tuple[int, int], dict[tuple, set[int]]] = {}
    for (i, j), sigs in sig.items():
        table: dict[tuple, set[int]] = {}
        for ci, key in enumerate(sigs):
            table.setdefault(key, set()).add(ci)
        index[(i, j)] = table

    def extend(chosen: list[int], domains: list[set[int]]) -> list[int] | None:
        i = len(chosen)
        if i == p.k:
            return chosen
        for ci in sorted(domains[i]):
            narrowed = list(domains)
            for l in range(i + 1, p.k):
                narrowed[l] = domains[l] & index[(l, i)].get(sig[(i, l)][ci], set())
            if all(narrowed[l] for l in range(i + 1, p.k)):
                found = extend(chosen + [ci], narrowed)
                if found is not None:
                    return found
        return None

    found = extend([], [set(range(len(cands[i]))) for i in range(p.k)])
    if found is None:
        return None
    maps = {i: Embedding(p.nodes[full - {i}], top, cands[i][c]) for i, c in enumerate(found)}
    return Solution(top, maps)


# -------------------------------------------------------------- parity system


@dataclass(frozen=True, eq=False)
class ParitySystem:
    size: int
    variables: tuple[tuple[int, int], ...]
    matrix: np.ndarray
    rhs: np.ndarray
    labels: tuple[str, ...]


def build_parity_system(n: int, twisted: bool = True) -> ParitySystem:
    """Unknowns m_ij (i != j) on indices 0..n+1; the twisted pair is {n, n+1}."""
    size = n + 2
    variables = tuple((i, j) for i in range(size) for j in range(size) if i != j)
    pos = {v: r for r, v in enumerate(variables)}
    rows, rhs, labels = [], [], []
    for i in range(size):
        row = np.zeros(len(variables), dtype=np.uint8)
        for j in range(size):
            if j != i:
                row[pos[(i, j)]] = 1
        rows.append(row)
        rhs.append(0)
        labels.append(f"row {i} sums to 0")
    for i, j in combinations(range(size), 2):
        row = np.zeros(len(variables), dtype=np.uint8)
        row[pos[(i, j)]] = row[pos[(j, i)]] = 1
        rows.append(row)
        if twisted and (i, j) == (n, n + 1):
            rhs.append(1)
            labels.append(f"m[{i},{j}] = m[{j},{i}] + 1")
        else:
            rhs.append(0)
            labels.append(f"m[{i},{j}] = m[{j},{i}]")
    return ParitySystem(size, variables, np.array(rows), np.array(rhs, dtype=np.uint8), tuple(labels))


@dataclass(frozen=True, eq=False)
class ParityResult:
    n: int
    twisted: bool
    feasible: bool
    witness: np.ndarray | None
    certificate: tuple[str, ...] | None
    brute_force_feasible: bool | None
    brute_force_solutions: int | None


def _brute_force_count(system: ParitySystem, chunk: int = 1 << 16) -> int:
    nv = len(system.variables)
    A = system.matrix.astype(np.int64)
    b = system.rhs.astype(np.int64)
    total = 0
    for start in range(0, 1 << nv, chunk):
        idx = np.arange(start, min(start + chunk, 1 << nv), dtype=np.int64)
        X = (idx[:, None] >> np.arange(nv)) & 1
        ok = ((X @ A.T) & 1 == b).all(axis=1)
        total += int(ok.sum())
    return total


def parity_obstruction(n: int, twisted: bool = True, brute_force: bool | None = None) -> ParityResult:
    """Feasibility of the row-sum / symmetry system, by elimination and optionally enumeration."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    system = build_parity_system(n, twisted)
    nv = len(system.variables)
    if brute_force is None:
        brute_force = nv <= 20
    solved = solve_affine(system.matrix, system.rhs)
    witness = certificate = None
    if solved is not None:
        witness = np.zeros((system.size, system.size), dtype=np.uint8)
        for (i, j), bit in zip(system.variables, solved[0]):
            witness[i, j] = bit
    else:
        y = inconsistency_certificate(system.matrix, system.rhs)
        certificate = tuple(lab for lab, bit in zip(system.labels, y) if bit)
    bf_feasible = bf_count = None
    if brute_force:
        bf_count = _brute_force_count(system)
        bf_feasible = bf_count > 0
        if bf_feasible != (solved is not None):
            raise AssertionError("enumeration disagrees with elimination on the parity system")
    return ParityResult(n, twisted, solved is not None, witness, certificate, bf_feasible, bf_count)


# ------------------------------------------------------------ constructive


def _window_copy_maps(model: WindowModel, lo: Sequence[int], hi: Sequence[int], avoid: Collection[int]):
    free = [x for x in range(model.N) if x not in set(avoid)]
    if len(free) < len(lo) + len(hi):
        raise ValueError("window too small to host independent copies")
    sigma0 = extend_to_permutation(dict(zip(sorted(lo), free[: len(lo)])), model.N)
    sigma1 = extend_to_permutation(dict(zip(sorted(hi), free[len(lo) : len(lo) + len(hi)])), model.N)
    return model.automorphism(sigma=sigma0), model.automorphism(sigma=sigma1)


def _align(
    p: AmalgamationProblem, s: frozenset[int], built: dict, top: ClosedSet
) -> WindowAutomorphism | None:
    """An automorphism phi with phi after a_{t,s} equal to built[t] for every t below s."""
    model = p.model
    partial: dict[int, int] = {}
    for i in sorted(s):
        tau = p.transitions[(frozenset({i}), s)].carrier
        for c in p.supports[i]:
            partial[tau.sigma[c]] = built[frozenset({i})].carrier.sigma[c]
    if not set(partial.values()) <= top.support:
        return None
    sigma = extend_to_permutation(partial, model.N)
    K = model.fiber_module.basis
    rows, rhs = [], []
    below = [frozenset(c) for m in range(1, len(s)) for c in combinations(sorted(s), m)]
    for t in below:
        a_ts = p.transitions[(t, s)].carrier
        target = built[t].carrier
        for c in p.nodes[t].support:
            if sigma[a_ts.sigma[c]] != target.sigma[c]:
                return None
        for w in subsets_of(p.nodes[t].support, model.n):
            r = rank_colex(w)
            rows.append(K[:, rank_colex(a_ts.move(w))])
            rhs.append(int(a_ts.g[r]) ^ int(target.g[r]))
    if rows:
        solved = solve_affine(np.array(rows, dtype=np.uint8), np.array(rhs, dtype=np.uint8))
        if solved is None:
            return None
        x, homog = solved
        g0 = matmul(x, K)
        spread = F2Subspace.span(matmul(homog.basis, K), K.shape[1]) if homog.dim else F2Subspace.zero(K.shape[1])
        g = coset_min(g0, spread)
    else:
        g = np.zeros(K.shape[1], dtype=np.uint8)
    return model.automorphism(g, sigma)


def goko_solve(p: AmalgamationProblem) -> Solution | None:
    """Build a solution level by level from two independent copies.

    The sub-problem over the first k-1 indices is copied by sigma0 and the
    last base node by sigma1 into fresh room of the window; every proper
    index set s is then aligned with the copies by an automorphism found
    from a linear system, ties broken by the smallest cocycle.
    """
    model = p.model
    model.require_exact()
    if p.twist is not None:
        raise ProblemError("the constructive solver takes untwisted standard problems")
    k, n = p.k, model.n
    if not 2 <= k <= n + 1:
        raise ProblemError(f"need 2 <= k <= n+1 = {n + 1}, got k = {k}")
    bad = validate_problem(p)
    if bad:
        raise ProblemError(f"invalid problem: {bad[0].condition}: {bad[0].detail}")
    U = p.union
    if model.N < 2 * len(U):
        raise ValueError(f"window {model.N} too small: need N >= 2|U| = {2 * len(U)}")
    full = p.full
    lower = full - {k - 1}
    sigma0, sigma1 = _window_copy_maps(model, p.support_of(lower), p.supports[k - 1], U)
    top_support = frozenset(sigma0.sigma[c] for c in p.support_of(lower)) | frozenset(
        sigma1.sigma[c] for c in p.supports[k - 1]
    )
    top = model.cl(top_support)
    built: dict[frozenset[int], Embedding] = {frozenset(): Embedding(p.nodes[frozenset()], top, model.identity())}
    for i in range(k - 1):
        carrier = sigma0.compose(p.transitions[(frozenset({i}), lower)].carrier)
        built[frozenset({i})] = Embedding(p.nodes[frozenset({i})], top, carrier)
    built[frozenset({k - 1})] = Embedding(p.nodes[frozenset({k - 1})], top, sigma1)
    trace = []
    for m in range(2, k):
        for s in map(frozenset, combinations(range(k), m)):
            gap = uniqueness_gap(model, m, [p.supports[i] for i in sorted(s)])
            phi = _align(p, s, built, top)
            trace.append((tuple(sorted(s)), gap.unique, phi is not None))
            if phi is None:
                log.info("alignment failed at %s", sorted(s))
                return None
            built[s] = Embedding(p.nodes[s], top, phi)
    maps = {i: built[full - {i}] for i in range(k)}
    sol = Solution(top, maps, extension=built, trace=tuple(trace))
    return sol
