"""Independent rank oracle for the inclusion maps; writes tests/golden/ranks.txt.

Shares no code with the package: subsets come from itertools, ranks from
int-bitset elimination, cross-checked against Wilson's closed form for the
GF(2) rank of the t- vs k-subset inclusion matrix when t <= min(k, N-k).

    python tests/oracles/rank_oracle.py
"""

from __future__ import annotations

import math
from itertools import combinations
from pathlib import Path

GOLDEN = Path(__file__).resolve().parents[1] / "golden" / "ranks.txt"


def inclusion_rows(N: int, t: int, k: int) -> list[int]:
    """One int bitset per t-subset, bit c set iff it lies in the c-th k-subset."""
    big = list(combinations(range(N), k))
    rows = []
    for small in combinations(range(N), t):
        s = set(small)
        bits = 0
        for c, w in enumerate(big):
            if s.issubset(w):
                bits |= 1 << c
        rows.append(bits)
    return rows


def bitset_rank(rows: list[int]) -> int:
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top not in basis:
                basis[top] = r
                break
            r ^= basis[top]
    return len(basis)


def wilson_rank(N: int, t: int, k: int) -> int | None:
    if not t <= min(k, N - k):
        return None
    return sum(
        math.comb(N, i) - (math.comb(N, i - 1) if i else 0)
        for i in range(t + 1)
        if math.comb(k - i, t - i) % 2 == 1
    )


def record(N: int, n: int) -> tuple[int, int, int, int, int]:
    lo = bitset_rank(inclusion_rows(N, n - 1, n))
    hi = bitset_rank(inclusion_rows(N, n, n + 1))
    for got, (t, k) in ((lo, (n - 1, n)), (hi, (n, n + 1))):
        w = wilson_rank(N, t, k)
        if w is not None and w != got:
            raise SystemExit(f"Wilson mismatch at N={N}, t={t}, k={k}: {w} vs {got}")
    mid = math.comb(N, n)
    return N, n, lo, hi, int(lo + hi == mid)


def main() -> None:
    lines = ["# N n rank_lo rank_hi exact"]
    for n in range(1, 6):
        for N in range(n + 1, n + 7):
            lines.append(" ".join(str(x) for x in record(N, n)))
    GOLDEN.parent.mkdir(parents=True, exist_ok=True)
    GOLDEN.write_text("\n".join(lines) + "\n")
    print(f"wrote {len(lines) - 1} records to {GOLDEN}")


if __name__ == "__main__":
    main()
