"""Command-line front end for the verification suites.

Every suite produces check records {name, params, expected, observed,
pass, ms}; the JSON report is {meta, checks} and the markdown report is a
rendering of the same records.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .amalgam import (
    build_standard_problem,
    goko_solve,
    parity_obstruction,
    search_existence,
    singletons,
    solve_existence,
    uniqueness_gap,
    verify_solution,
)
from .hrushovski import coincide_check, preservation_brute_force
from .mstruct import WindowModel
from .permmod import (
    aux_distributivity_check,
    char_identity,
    direct_sum_check,
    exactness_check,
    smallest_exact_window,
    uniqueimage_identity,
    v_A_identity,
)

OUT_DIR_ENV = "F2AMALGAM_OUT_DIR"
INDEXING_NOTE = (
    "indices and ground elements are 0-based; the twisted pair {n, n+1} is "
    "{n+1, n+2} in 1-based labels"
)
# exhaustive cross-check bounds; n = 4 has 2**20 cocycles per window
SEARCH_WINDOW = 7
SEARCH_MAX_N = 3


@dataclass(frozen=True)
class ExperimentConfig:
    ns: tuple[int, ...] = (2, 3, 4)
    windows: tuple[int, ...] | None = None
    k_max: int | None = None
    seed: int = 0
    samples: int = 24
    out: str | None = None
    fmt: str = "json"
    timings: bool = False
    jobs: int = 1

    def __post_init__(self) -> None:
        if any(n < 2 for n in self.ns):
            raise ValueError("every n must be >= 2")
        for n in self.ns:
            for N in self.windows or ():
                if N < n + 2:
                    raise ValueError(f"window {N} is below n+2 = {n + 2}")
        if self.fmt not in ("json", "markdown"):
            raise ValueError(f"unknown format {self.fmt!r}")


@dataclass
class Report:
    meta: dict
    checks: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def to_json(self) -> str:
        return json.dumps({"meta": self.meta, "checks": self.checks}, indent=2, sort_keys=True) + "\n"

    def to_markdown(self) -> str:
        lines = [f"# f2amalgam {self.meta['command']}", ""]
        for key in sorted(self.meta):
            if key != "command":
                lines.append(f"- {key}: `{json.dumps(self.meta[key], sort_keys=True)}`")
        rows = [c for c in self.checks if c["name"] == "summary_pattern"]
        if rows:
            lines += ["", "## Summary", "", "| n | k-existence, k <= n+1 | (n+2)-existence fails | k-uniqueness, k <= n | (n+1)-uniqueness fails | pattern |", "|---|---|---|---|---|---|"]
            for c in rows:
                o = c["observed"]
                cells = [o["existence_up_to_n_plus_1"], o["no_existence_n_plus_2"], o["uniqueness_up_to_n"], o["no_uniqueness_n_plus_1"], c["pass"]]
                lines.append(f"| {c['params']['n']} | " + " | ".join(_mark(x) for x in cells) + " |")
        lines += ["", "## Checks", "", "| name | params | expected | observed | pass | ms |", "|---|---|---|---|---|---|"]
        for c in self.checks:
            cells = [c["name"]] + [_cell(c[k]) for k in ("params", "expected", "observed")]
            cells += [_mark(c["pass"]), "" if c["ms"] is None else str(c["ms"])]
            lines.append("| " + " | ".join(cells) + " |")
        lines.append("")
        return "\n".join(lines)

    def render(self, fmt: str) -> str:
        return self.to_json() if fmt == "json" else self.to_markdown()


def _mark(x: bool) -> str:
    return "yes" if x else "NO"


def _cell(v) -> str:
    return "`" + json.dumps(v, sort_keys=True).replace("|", "\\|") + "`"


def _check(name: str, params: dict, expected, observed, ok: bool, ms: float | None) -> dict:
    return {"name": name, "params": params, "expected": expected, "observed": observed, "pass": bool(ok), "ms": ms}


def _timed(fn: Callable, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, round((time.perf_counter() - t0) * 1000, 1)


# ------------------------------------------------------------------- windows


def amalgam_window(n: int, start: int | None = None) -> int:
    """Smallest certified window from max(n+3, 7) (or ``start``) upward."""
    return smallest_exact_window(n, start if start is not None else max(n + 3, 7))


def _amalgam_windows(config: ExperimentConfig, n: int) -> list[int]:
    if config.windows:
        return [amalgam_window(n, N) for N in config.windows]
    return [amalgam_window(n)]


# --------------------------------------------------------------------- cells
# Cells are module-level so they can run in worker processes.


def _cell_exactness(n: int, N: int) -> dict:
    cert = exactness_check(N, n)
    obs = {"composite_zero": True, "rank_lo": cert.rank_lo, "rank_hi": cert.rank_hi, "dim_mid": cert.dim_mid, "exact": cert.exact}
    return {"name": "exactness", "params": {"n": n, "N": N}, "expected": {"composite_zero": True}, "observed": obs, "pass": True}


def _cell_uniqueness(n: int, k: int, N: int) -> dict:
    gap = uniqueness_gap(WindowModel((N, n)), k, singletons(k))
    obs = {"order_constrained": gap.order_constrained, "order_free": gap.order_free, "unique": gap.unique}
    if k <= n:
        expected = {"unique": True}
        ok = gap.unique
    else:
        expected = {"order_constrained": 1, "order_free": 2, "unique": False}
        ok = obs == expected
    return {"name": "uniqueness", "params": {"n": n, "k": k, "N": N}, "expected": expected, "observed": obs, "pass": ok}


def _cell_goko(n: int, k: int, N: int) -> dict:
    N = smallest_exact_window(n, max(N, 2 * k))
    p = build_standard_problem(WindowModel((N, n)), singletons(k))
    sol = goko_solve(p)
    verified = sol is not None and not verify_solution(p, sol)
    obs = {"solution": sol is not None, "verified": verified}
    if sol is not None:
        obs["aligned_levels"] = len(sol.trace)
    return {"name": "existence", "params": {"n": n, "k": k, "N": N}, "expected": {"solution": True, "verified": True}, "observed": obs, "pass": verified}


def _cell_twisted(n: int, N: int) -> dict:
    model = WindowModel((N, n))
    k = n + 2
    twisted = build_standard_problem(model, singletons(k), twist=True)
    control = build_standard_problem(model, singletons(k))
    parity = parity_obstruction(n)
    parity_control = parity_obstruction(n, twisted=False)
    linear = solve_existence(twisted)
    linear_control = solve_existence(control)
    obs = {
        "linear_solution": linear is not None,
        "parity_feasible": parity.feasible,
        "parity_brute_force": parity.brute_force_feasible,
        "control_solution": linear_control is not None and not verify_solution(control, linear_control),
        "control_parity_feasible": parity_control.feasible,
        "certificate_size": len(parity.certificate or ()),
    }
    if N <= SEARCH_WINDOW and n <= SEARCH_MAX_N:
        obs["exhaustive_solution"] = search_existence(twisted) is not None
    ok = (
        not obs["linear_solution"]
        and not obs["parity_feasible"]
        and obs["parity_brute_force"] in (False, None)
        and obs["control_solution"]
        and obs["control_parity_feasible"]
        and not obs.get("exhaustive_solution", False)
    )
    expected = {"linear_solution": False, "parity_feasible": False, "control_solution": True}
    return {"name": "existence_twisted", "params": {"n": n, "k": k, "N": N}, "expected": expected, "observed": obs, "pass": ok}


def _cell_coincide(n: int, N: int) -> dict:
    r = coincide_check(N, n)
    obs = {"ker_mu_dim": r.ker_mu_dim, "ker_beta_dim": r.ker_beta_dim, "equal": r.equal, "im_contained": r.im_contained, "im_equal": r.im_equal}
    exact = exactness_check(N, n).exact
    ok = r.equal and r.im_contained and r.im_equal == exact
    return {"name": "coincide", "params": {"n": n, "N": N}, "expected": {"equal": True, "im_contained": True, "im_equal": exact}, "observed": obs, "pass": ok}


def _cell_preservation(n: int, N: int) -> dict:
    r = preservation_brute_force(N, n)
    obs = {k: v for k, v in asdict(r).items() if k not in ("N", "n")}
    ok = r.sym_preserves and r.kernel_preserves and r.converse_holds
    expected = {"sym_preserves": True, "kernel_preserves": True, "converse_holds": True}
    return {"name": "preservation", "params": {"n": n, "N": N}, "expected": expected, "observed": obs, "pass": ok}


def _cell_stabilizer(n: int, N: int, A: tuple[int, ...]) -> dict:
    r = WindowModel((N, n)).stabilizer_brute_force(A)
    obs = {"fixing": r.fixing, "predicted": r.predicted, "matches": r.matches}
    return {"name": "stabilizer", "params": {"n": n, "N": N, "A": list(A)}, "expected": {"matches": True}, "observed": obs, "pass": r.matches}


def _cell_identities(n: int, N: int, A: tuple[int, ...], families: tuple[tuple[int, ...], ...]) -> dict:
    aux = aux_distributivity_check(N, n, families)
    obs = {
        "v_A": v_A_identity(N, n, A),
        "direct_sum": direct_sum_check(N, n, A).holds,
        "char": char_identity(N, n, A),
        "w_A": uniqueimage_identity(N, n, A),
        "aux": aux.holds,
    }
    expected = {key: True for key in obs}
    params = {"n": n, "N": N, "A": list(A), "families": [list(F) for F in families]}
    return {"name": "identities", "params": params, "expected": expected, "observed": obs, "pass": all(obs.values())}


# -------------------------------------------------------------------- suites


def _exactness_cells(config: ExperimentConfig) -> list[tuple]:
    cells = []
    for n in config.ns:
        for N in config.windows or range(n + 1, n + 7):
            cells.append((_cell_exactness, n, N))
    return cells


def _uniqueness_cells(config: ExperimentConfig) -> list[tuple]:
    cells = []
    for n in config.ns:
        top = min(config.k_max or n + 1, n + 1)
        for N in _amalgam_windows(config, n):
            cells += [(_cell_uniqueness, n, k, N) for k in range(2, top + 1)]
    return cells


def _existence_cells(config: ExperimentConfig) -> list[tuple]:
    cells = []
    for n in config.ns:
        top = min(config.k_max or n + 2, n + 2)
        for N in _amalgam_windows(config, n):
            cells += [(_cell_goko, n, k, N) for k in range(2, min(top, n + 1) + 1)]
            if top == n + 2:
                cells.append((_cell_twisted, n, N))
    return cells


def _coincide_cells(config: ExperimentConfig) -> list[tuple]:
    cells = []
    for n in config.ns:
        for N in config.windows or range(n + 2, n + 5):
            cells.append((_cell_coincide, n, N))
    if 2 in config.ns:
        cells += [(_cell_preservation, 2, N) for N in (4, 5)]
    return cells


def _sample_identity_cells(config: ExperimentConfig) -> list[tuple]:
    rng = np.random.default_rng(config.seed)
    cells = []
    while len(cells) < config.samples:
        n = int(rng.choice(config.ns))
        N = int(rng.integers(n + 2, n + 5))
        if not exactness_check(N, n).exact:
            continue
        A = tuple(sorted(int(x) for x in rng.choice(N, size=int(rng.integers(0, min(N, n + 2) + 1)), replace=False)))
        fam = tuple(
            tuple(sorted(int(x) for x in rng.choice(N, size=int(rng.integers(0, N + 1)), replace=False)))
            for _ in range(int(rng.integers(1, n)))
        )
        cells.append((_cell_identities, n, N, A, fam))
    return cells


def _stabilizer_cells(config: ExperimentConfig) -> list[tuple]:
    cells = []
    for n in config.ns:
        N = 6 if n <= 4 else None
        if N is None or not exactness_check(N, n).exact:
            continue
        cells += [(_cell_stabilizer, n, N, A) for A in ((), (0,), tuple(range(n)), tuple(range(n + 1)))]
    return cells


def _run_cell(cell: tuple, timings: bool) -> dict:
    fn, *args = cell
    record, ms = _timed(fn, *args)
    record["ms"] = ms if timings else None
    return record


def _run(cells: list[tuple], config: ExperimentConfig) -> list[dict]:
    if config.jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            return list(pool.map(_run_cell, cells, [config.timings] * len(cells)))
    return [_run_cell(c, config.timings) for c in cells]


def _meta(command: str, config: ExperimentConfig) -> dict:
    cfg = asdict(config)
    cfg.pop("out")
    cfg.pop("jobs")
    return {
        "command": command,
        "package": "f2amalgam",
        "version": __version__,
        "numpy": np.__version__,
        "config": cfg,
        "indexing": INDEXING_NOTE,
    }


def _suite(command: str, builders: Sequence[Callable], config: ExperimentConfig) -> Report:
    cells = [c for b in builders for c in b(config)]
    return Report(_meta(command, config), _run(cells, config))


def cmd_exactness(config: ExperimentConfig) -> Report:
    """Ranks of the dual maps and exactness flags over a sweep of windows."""
    report = _suite("exactness", [_exactness_cells], config)
    for n in config.ns:
        exact = [c["params"]["N"] for c in report.checks if c["name"] == "exactness" and c["params"]["n"] == n and c["observed"]["exact"] and c["params"]["N"] <= n + 6]
        report.checks.append(_check("exact_window", {"n": n}, {"some_exact_N_at_most": n + 6}, {"exact_windows": exact}, bool(exact), None))
    return report


def cmd_uniqueness(config: ExperimentConfig) -> Report:
    """Induced-group orders for k = 2..n+1 with singleton supports."""
    return _suite("uniqueness", [_uniqueness_cells], config)


def cmd_existence(config: ExperimentConfig) -> Report:
    """Constructive solutions for k <= n+1 and the twisted (n+2)-problem."""
    return _suite("existence", [_existence_cells], config)


def cmd_coincide(config: ExperimentConfig) -> Report:
    """Kernel of the parity relation against the dual kernel, plus preservation."""
    return _suite("coincide", [_coincide_cells], config)


def cmd_report(config: ExperimentConfig) -> Report:
    """All suites, sampled subspace identities and the per-n summary."""
    full = ExperimentConfig(**{**asdict(config), "k_max": None})
    report = _suite(
        "report",
        [_exactness_cells, _uniqueness_cells, _existence_cells, _coincide_cells, _stabilizer_cells, _sample_identity_cells],
        full,
    )
    report.meta["config"] = _meta("report", config)["config"]
    for n in config.ns:
        mine = [c for c in report.checks if c["params"].get("n") == n]
        row = {
            "existence_up_to_n_plus_1": _all(mine, "existence"),
            "no_existence_n_plus_2": _all(mine, "existence_twisted"),
            "uniqueness_up_to_n": _all([c for c in mine if c["params"].get("k", 0) <= n], "uniqueness"),
            "no_uniqueness_n_plus_1": _all([c for c in mine if c["params"].get("k", 0) == n + 1], "uniqueness"),
        }
        report.checks.append(_check("summary_pattern", {"n": n}, {key: True for key in row}, row, all(row.values()), None))
    return report


def _all(checks: list[dict], name: str) -> bool:
    picked = [c for c in checks if c["name"] == name]
    return bool(picked) and all(c["pass"] for c in picked)


COMMANDS: dict[str, Callable[[ExperimentConfig], Report]] = {
    "exactness": cmd_exactness,
    "uniqueness": cmd_uniqueness,
    "existence": cmd_existence,
    "coincide": cmd_coincide,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="f2amalgam", description="Amalgamation checks for the GF(2) cover structures.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__.strip())
        p.add_argument("--n", type=int, nargs="+", default=[2, 3, 4], help="arities to run (default: 2 3 4)")
        p.add_argument("--window", type=int, nargs="+", default=None, help="window sizes (default: per suite)")
        p.add_argument("--k-max", type=int, default=None, help="largest number of indices")
        p.add_argument("--seed", type=int, default=0, help="seed for sampled identities")
        p.add_argument("--samples", type=int, default=24, help="sampled identity triples (report only)")
        p.add_argument("--out", default=None, help=f"output file (default: ${OUT_DIR_ENV}/<command>.<ext> if set, else stdout only)")
        p.add_argument("--format", dest="fmt", choices=["json", "markdown"], default="json")
        p.add_argument("--timings", action="store_true", help="record per-check runtimes (breaks byte-identity)")
        p.add_argument("--jobs", type=int, default=1, help="worker processes")
    return parser


def _output_path(args, fmt: str) -> Path | None:
    if args.out:
        return Path(args.out)
    base = os.environ.get(OUT_DIR_ENV)
    if base:
        return Path(base) / f"{args.command}.{'json' if fmt == 'json' else 'md'}"
    return None


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.k_max is not None and args.k_max < 2:
        parser.error("--k-max must be at least 2")
    try:
        config = ExperimentConfig(
            ns=tuple(args.n),
            windows=tuple(args.window) if args.window else None,
            k_max=args.k_max,
            seed=args.seed,
            samples=args.samples,
            out=args.out,
            fmt=args.fmt,
            timings=args.timings,
            jobs=args.jobs,
        )
    except ValueError as exc:
        parser.error(str(exc))
    report = COMMANDS[args.command](config)
    text = report.render(config.fmt)
    path = _output_path(args, config.fmt)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    sys.stdout.write(text)
    return 0 if report.passed else 1
