"""Batch command-line front end: every counting pipeline, machine-readable
reports, and formula-vs-oracle verification.

Reports are JSON (all counts as decimal strings) with a CSV `n,count`
mirror; `--verify` cross-checks closed forms against the brute-force
oracles and never reports pass on a mismatch.  Exit codes: 0 pass, 2 a
cross-check failed, 1 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import gallery
from .actions import PermGroup, TooLarge
from .codes import codes_quasipolynomial, count_codes_burnside, count_codes_direct
from .functors.elementary import (
    ElementaryModelFunctor,
    elementary_brute,
    elementary_count,
    elementary_quasipolynomial,
)
from .functors.extraction import mf_count_via_groupoid
from .functors.model import mf_orbit_count_direct, roots_of_unity, elementary_embedding
from .functors.precomponent import (
    PreComponentPresentation,
    planes_precomponent,
    precomp_count,
)
from .lattice import DownwardClosedSet
from .quasipoly import FittedQuasipolynomial, NoFit, fit, read_sequence_csv

BRUTE_DEFAULT_BUDGET = 10**6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunReport:
    command: List[str]
    parameters: Dict[str, object]
    sequence: List[Tuple[int, int]] = dc_field(default_factory=list)
    quasipolynomial: Optional[dict] = None
    verdicts: List[dict] = dc_field(default_factory=list)
    timings_ms: Dict[int, float] = dc_field(default_factory=dict)
    truncated: bool = False

    @property
    def failed(self) -> bool:
        return any(v.get("status") == "fail" for v in self.verdicts)

    def add_verdict(self, check: str, ok: bool, witness: Optional[dict] = None) -> None:
        entry = {"check": check, "status": "pass" if ok else "fail"}
        if witness:
            entry["witness"] = witness
        self.verdicts.append(entry)

    def to_json_dict(self, include_timings: bool = True) -> dict:
        out = {
            "command": self.command,
            "parameters": {k: _stringify(v) for k, v in sorted(self.parameters.items())},
            "sequence": [[str(n), str(c)] for n, c in self.sequence],
            "verdict": "fail" if self.failed else "pass",
            "checks": self.verdicts,
            "truncated": self.truncated,
        }
        if self.quasipolynomial is not None:
            out["quasipolynomial"] = self.quasipolynomial
        if include_timings:
            out["timings_ms"] = {str(n): round(t, 3) for n, t in self.timings_ms.items()}
        return out


def _stringify(value):
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, (int, Fraction)):
        return str(value)
    return value


def parse_range(text: str) -> List[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo_i, hi_i = int(lo), int(hi)
        if hi_i < lo_i:
            raise UsageError(f"empty range {text!r}")
        return list(range(lo_i, hi_i + 1))
    return [int(text)]


def _qp_json(res: FittedQuasipolynomial) -> dict:
    return res.to_json_dict()


class _Budget:
    def __init__(self, max_states: int, time_limit: Optional[float]):
        self.max_states = max_states
        self.time_limit = time_limit
        self.start = time.monotonic()

    def out_of_time(self) -> bool:
        return self.time_limit is not None and time.monotonic() - self.start > self.time_limit


def _emit(report: RunReport, args) -> int:
    payload = json.dumps(
        report.to_json_dict(include_timings=not args.no_timing),
        indent=2,
        sort_keys=True,
    )
    if args.out:
        Path(args.out).write_text(payload + "\n")
        csv_path = Path(args.out).with_suffix(".csv")
    else:
        sys.stdout.write(payload + "\n")
        csv_path = Path(args.csv) if args.csv else None
    if args.out and args.csv:
        csv_path = Path(args.csv)
    if csv_path is not None:
        lines = ["n,count"] + [f"{n},{c}" for n, c in report.sequence]
        csv_path.write_text("\n".join(lines) + "\n")
    return 2 if report.failed else 0


def _add_common(parser: _Parser) -> None:
    parser.add_argument("--out", help="write the JSON report to this file instead of stdout")
    parser.add_argument("--csv", help="write the n,count CSV to this file")
    parser.add_argument("--no-timing", action="store_true", help="omit wall times for byte-stable output")
    parser.add_argument("--max-states", type=int, default=BRUTE_DEFAULT_BUDGET,
                        help="state budget for brute-force oracles")
    parser.add_argument("--time-limit", type=float, default=None,
                        help="soft wall-clock limit in seconds; exceeding truncates the report")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker cap (falls back to WIDECOUNT_THREADS; counting is deterministic)")


def _resolve_threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("WIDECOUNT_THREADS")
    return max(1, int(env)) if env else 1


def build_parser() -> _Parser:
    parser = _Parser(prog="widecount", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("elementary", help="count words up to letter group and position symmetry")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--group", default="", help='generators in cycle notation, e.g. "(1 2)"; empty = trivial')
    p.add_argument("--obstructions", default="[]", help='JSON list of obstruction vectors, e.g. "[[2,0]]"')
    p.add_argument("--n", required=True, help="value or range A..B")
    p.add_argument("--fit", action="store_true")
    p.add_argument("--verify", action="store_true", help="cross-check against the word-enumeration oracle")
    _add_common(p)

    p = sub.add_parser("model", help="count classes of a builtin model functor presentation")
    p.add_argument("--preset", choices=("roots-of-unity", "elementary"), required=True)
    p.add_argument("--d", type=int, default=2, help="roots-of-unity order")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--group", default="")
    p.add_argument("--obstructions", default="[]")
    p.add_argument("--n", required=True)
    p.add_argument("--method", choices=("direct", "groupoid", "both"), default="both")
    _add_common(p)

    p = sub.add_parser("precomp", help="count maximal classes of a builtin pre-component functor")
    p.add_argument("--preset", choices=("planes", "roots-of-unity"), required=True)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", required=True)
    p.add_argument("--fit", action="store_true")
    _add_common(p)

    p = sub.add_parser("example", help="run a worked example with its oracle")
    p.add_argument("name", choices=gallery.EXAMPLES)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--n", required=True)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--fit", action="store_true")
    _add_common(p)

    p = sub.add_parser("codes", help="classify linear codes up to equivalence")
    code_sub = p.add_subparsers(dest="codes_command", required=True)
    pc = code_sub.add_parser("count")
    pc.add_argument("--q", type=int, required=True)
    pc.add_argument("--m", type=int, required=True)
    pc.add_argument("--n", required=True)
    pc.add_argument("--method", choices=("direct", "burnside", "both"), default="both")
    _add_common(pc)
    pf = code_sub.add_parser("fit")
    pf.add_argument("--q", type=int, required=True)
    pf.add_argument("--m", type=int, required=True)
    pf.add_argument("--nmax", type=int, required=True)
    pf.add_argument("--max-period", type=int, default=6)
    pf.add_argument("--max-degree", type=int, default=6)
    _add_common(pf)

    p = sub.add_parser("ranks", help="orbits of fixed-rank matrices with entries in a finite set")
    p.add_argument("--entries", default="0,1", help="comma-separated rationals, e.g. 0,1 or 0,1/2")
    p.add_argument("--k", type=int, required=True, help="target rank")
    p.add_argument("--n", required=True)
    p.add_argument("--shape", choices=("symmetric", "general"), default="symmetric")
    p.add_argument("--verify", action="store_true", help="check against the closed forms where known")
    _add_common(p)

    p = sub.add_parser("fit", help="fit a quasipolynomial to an n,count CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--max-period", type=int, default=6)
    p.add_argument("--max-degree", type=int, default=4)
    _add_common(p)

    p = sub.add_parser("verify", help="run the formula-vs-oracle cross-check suite")
    _add_common(p)

    return parser


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------


def _elementary_from_args(args) -> ElementaryModelFunctor:
    gens = [g for g in args.group.split(")") if g.strip()]
    gens = [g + ")" for g in gens]
    group = PermGroup.from_cycle_strings(args.k, gens) if gens else PermGroup.trivial(args.k)
    obstructions = json.loads(args.obstructions)
    countset = DownwardClosedSet(args.k, [tuple(o) for o in obstructions])
    return ElementaryModelFunctor(args.k, group, countset)


def _run_elementary(args, report: RunReport, budget: _Budget) -> None:
    emf = _elementary_from_args(args)
    for n in parse_range(args.n):
        if budget.out_of_time():
            report.truncated = True
            break
        t0 = time.monotonic()
        count = elementary_count(emf, n)
        report.sequence.append((n, count))
        if args.verify:
            if emf.k**n <= min(args.max_states, 10**7):
                brute = elementary_brute(emf, n)
                report.add_verdict(
                    f"elementary-vs-brute@{n}",
                    count == brute,
                    None if count == brute else {"n": n, "count": str(count), "brute": str(brute)},
                )
        report.timings_ms[n] = (time.monotonic() - t0) * 1000
    if args.fit:
        res = elementary_quasipolynomial(emf)
        report.quasipolynomial = _qp_json(res)


def _model_presentation(args):
    if args.preset == "roots-of-unity":
        return roots_of_unity(args.d)
    return elementary_embedding(_elementary_from_args(args))


def _run_model(args, report: RunReport, budget: _Budget) -> None:
    pres = _model_presentation(args)
    for n in parse_range(args.n):
        if budget.out_of_time():
            report.truncated = True
            break
        t0 = time.monotonic()
        counts = {}
        if args.method in ("groupoid", "both"):
            counts["groupoid"] = mf_count_via_groupoid(pres, n)
        if args.method in ("direct", "both"):
            if pres.pair_count(n) <= args.max_states:
                counts["direct"] = mf_orbit_count_direct(pres, n)
            elif args.method == "direct":
                report.truncated = True
                break
        if not counts:
            report.truncated = True
            break
        value = next(iter(counts.values()))
        report.sequence.append((n, value))
        if len(counts) == 2:
            ok = counts["groupoid"] == counts["direct"]
            report.add_verdict(
                f"groupoid-vs-direct@{n}",
                ok,
                None if ok else {"n": n, **{k: str(v) for k, v in counts.items()}},
            )
        report.timings_ms[n] = (time.monotonic() - t0) * 1000


def _run_precomp(args, report: RunReport, budget: _Budget) -> None:
    if args.preset == "planes":
        pc = planes_precomponent()
    else:
        pc = PreComponentPresentation.from_single(roots_of_unity(args.d))
    ns = parse_range(args.n)
    for n in ns:
        if budget.out_of_time() or pc.item_count(n) > args.max_states:
            report.truncated = True
            break
        t0 = time.monotonic()
        report.sequence.append((n, precomp_count(pc, n)))
        report.timings_ms[n] = (time.monotonic() - t0) * 1000
    if args.fit and report.sequence:
        try:
            res = fit(dict(report.sequence), max_period=4, max_degree=3)
            report.quasipolynomial = _qp_json(res)
        except NoFit as exc:
            report.add_verdict("fit", False, {"nofit": str(exc), **(exc.witness or {})})


def _run_example(args, report: RunReport, budget: _Budget) -> None:
    name = args.name
    for n in parse_range(args.n):
        if budget.out_of_time():
            report.truncated = True
            break
        t0 = time.monotonic()
        data = gallery.example_counts(name, n, d=args.d)
        key = "orbits" if "orbits" in data else "labeled"
        report.sequence.append((n, data[key]))
        if args.verify:
            if name == "cube":
                brute = gallery.cube_orbit_count_brute(args.d, n)
                ok = data["orbits"] == brute
                report.add_verdict(
                    f"cube-formula-vs-brute@{n}",
                    ok,
                    None if ok else {"n": n, "formula": str(data["orbits"]), "brute": str(brute)},
                )
            elif name == "galois" and 2**n <= args.max_states:
                brute = gallery.galois_orbit_count_brute(n)
                report.add_verdict(f"galois-vs-brute@{n}", data["orbits"] == brute)
            elif name == "trees" and n <= 8:
                labeled, orbits = gallery.tree_orbit_count(n)
                growth = gallery.unlabeled_tree_counts(max(n, 1))[n - 1]
                report.add_verdict(f"trees-brute-vs-growth@{n}", orbits == growth)
            elif name == "points":
                # formula is the definition here; check the d=1 degeneration
                report.add_verdict(f"points@{n}", gallery.points_orbit_count(1, n) == 1)
            elif name == "planes":
                report.add_verdict(f"planes@{n}", data["orbits"] == 1)
        report.timings_ms[n] = (time.monotonic() - t0) * 1000
    if args.fit and report.sequence:
        try:
            res = fit(dict(report.sequence), max_period=max(args.d, 6), max_degree=6)
            report.quasipolynomial = _qp_json(res)
        except NoFit as exc:
            report.add_verdict("fit", False, {"nofit": str(exc), **(exc.witness or {})})


def _run_codes(args, report: RunReport, budget: _Budget) -> None:
    if args.codes_command == "count":
        for n in parse_range(args.n):
            if budget.out_of_time():
                report.truncated = True
                break
            t0 = time.monotonic()
            counts = {}
            if args.method in ("burnside", "both"):
                counts["burnside"] = count_codes_burnside(args.q, args.m, n)
            if args.method in ("direct", "both"):
                try:
                    counts["direct"] = count_codes_direct(args.q, args.m, n)
                except TooLarge:
                    if args.method == "direct":
                        report.truncated = True
                        break
            value = counts.get("burnside", counts.get("direct"))
            report.sequence.append((n, value))
            if len(counts) == 2:
                ok = counts["direct"] == counts["burnside"]
                report.add_verdict(
                    f"codes-direct-vs-burnside@{n}",
                    ok,
                    None if ok else {"n": n, **{k: str(v) for k, v in counts.items()}},
                )
            report.timings_ms[n] = (time.monotonic() - t0) * 1000
    else:
        for n in range(args.nmax + 1):
            report.sequence.append((n, count_codes_burnside(args.q, args.m, n)))
        try:
            res = codes_quasipolynomial(
                args.q, args.m, args.nmax, max_period=args.max_period, max_degree=args.max_degree
            )
            report.quasipolynomial = _qp_json(res)
        except NoFit as exc:
            report.add_verdict("fit", False, {"nofit": str(exc), **(exc.witness or {})})


def _parse_entries(text: str):
    return [Fraction(tok) for tok in text.split(",") if tok.strip()]


def _run_ranks(args, report: RunReport, budget: _Budget) -> None:
    entries = _parse_entries(args.entries)
    for n in parse_range(args.n):
        if budget.out_of_time():
            report.truncated = True
            break
        t0 = time.monotonic()
        counts = gallery.fixed_rank_orbit_counts(entries, n, args.shape)
        value = counts.get(args.k, 0)
        report.sequence.append((n, value))
        if args.verify and args.shape == "symmetric" and sorted(entries) == [0, 1] and args.k <= 2:
            want = gallery.symmetric_binary_rank_formula(args.k, n)
            report.add_verdict(
                f"rank-formula@{n}",
                value == want,
                None if value == want else {"n": n, "count": str(value), "formula": str(want)},
            )
        report.timings_ms[n] = (time.monotonic() - t0) * 1000


def _run_fit(args, report: RunReport, budget: _Budget) -> None:
    seq = read_sequence_csv(args.infile)
    report.sequence = sorted(seq.items())
    try:
        res = fit(seq, max_period=args.max_period, max_degree=args.max_degree)
        report.quasipolynomial = _qp_json(res)
        for n, value in seq.items():
            if n >= res.onset and res.qp.evaluate(n) != value:
                report.add_verdict("fit-recheck", False, {"n": n})
                break
    except NoFit as exc:
        report.add_verdict("fit", False, {"nofit": str(exc), **(exc.witness or {})})


def _run_verify(args, report: RunReport, budget: _Budget) -> None:
    """A condensed formula-vs-oracle pass over every pipeline."""
    galois = ElementaryModelFunctor(2, PermGroup.symmetric(2), DownwardClosedSet.full(2))
    checks: List[Tuple[str, bool]] = []
    checks.append(
        ("galois-closed-form", all(elementary_count(galois, n) == n // 2 + 1 for n in range(12)))
    )
    checks.append(
        ("galois-brute", all(elementary_count(galois, n) == elementary_brute(galois, n) for n in range(9)))
    )
    checks.append(
        ("cube-brute", all(
            gallery.cube_orbit_count(d, n) == gallery.cube_orbit_count_brute(d, n)
            for d in (2, 3, 4) for n in range(10)
        ))
    )
    pres = roots_of_unity(3)
    checks.append(
        ("groupoid-vs-direct", all(
            mf_count_via_groupoid(pres, n) == mf_orbit_count_direct(pres, n) for n in range(6)
        ))
    )
    checks.append(
        ("codes-direct-vs-burnside", all(
            count_codes_direct(2, m, n) == count_codes_burnside(2, m, n)
            for m in (1, 2) for n in range(2, 6)
        ))
    )
    checks.append(
        ("trees-growth", gallery.tree_orbit_count(6)[1] == gallery.unlabeled_tree_counts(6)[5])
    )
    for name, ok in checks:
        report.add_verdict(name, ok)


_RUNNERS = {
    "elementary": _run_elementary,
    "model": _run_model,
    "precomp": _run_precomp,
    "example": _run_example,
    "codes": _run_codes,
    "ranks": _run_ranks,
    "fit": _run_fit,
    "verify": _run_verify,
}


def run(argv: Sequence[str]) -> int:
    """Parse and execute; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    _resolve_threads(args)
    report = RunReport(
        command=list(argv),
        parameters={
            k: v
            for k, v in vars(args).items()
            if k not in ("out", "csv", "no_timing") and v is not None
        },
    )
    budget = _Budget(args.max_states, args.time_limit)
    try:
        _RUNNERS[args.subcommand](args, report, budget)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    except TooLarge as exc:
        report.truncated = True
        report.add_verdict("budget", True, {"truncated_by": str(exc)})
    return _emit(report, args)


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
