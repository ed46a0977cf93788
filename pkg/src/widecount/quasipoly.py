"""Exact quasipolynomials: evaluation, arithmetic, and fitting of integer sequences.

A quasipolynomial of period N is a list of N polynomials with rational
coefficients; constituent i is used at arguments congruent to i mod N.
All arithmetic is over ``fractions.Fraction`` -- no floating point.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

Poly = Tuple[Fraction, ...]  # coefficients, ascending degree; () is the zero polynomial


class NoFit(Exception):
    """No quasipolynomial within the search bounds matches the sequence.

    ``witness`` holds the most advanced failed attempt as a dict with keys
    period/degree/onset/residue/n/expected/actual (or reason).
    """

    def __init__(self, message: str, witness: Optional[dict] = None):
        super().__init__(message)
        self.witness = witness


def _trim(coeffs: Sequence[Fraction]) -> Poly:
    cs = [Fraction(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


def _poly_eval(poly: Poly, n: int) -> Fraction:
    acc = Fraction(0)
    for c in reversed(poly):
        acc = acc * n + c
    return acc


def _poly_add(p: Poly, q: Poly) -> Poly:
    out = [Fraction(0)] * max(len(p), len(q))
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    return _trim(out)


def _interpolate(points: Sequence[Tuple[int, Fraction]]) -> Poly:
    """Lagrange interpolation through distinct integer abscissae, exact."""
    coeffs = [Fraction(0)] * len(points)
    for i, (xi, yi) in enumerate(points):
        # build the i-th Lagrange basis polynomial incrementally
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            denom *= xi - xj
            new = [Fraction(0)] * (len(basis) + 1)
            for k, c in enumerate(basis):
                new[k] += c * (-xj)
                new[k + 1] += c
            basis = new
        scale = yi / denom
        for k, c in enumerate(basis):
            coeffs[k] += c * scale
    return _trim(coeffs)


@dataclass(frozen=True)
class Quasipolynomial:
    """Period plus one exact polynomial constituent per residue class.

    Instances are normalized on construction: the stored period is the
    smallest one reproducing all constituents.
    """

    period: int
    constituents: Tuple[Poly, ...]

    def __init__(self, period: int, constituents: Iterable[Sequence[Fraction]]):
        if period < 1:
            raise ValueError("period must be >= 1")
        consts = tuple(_trim(c) for c in constituents)
        if len(consts) != period:
            raise ValueError("need exactly one constituent per residue class")
        # minimal-period normalization: smallest divisor reproducing all constituents
        for div in range(1, period + 1):
            if period % div:
                continue
            if all(consts[i] == consts[i % div] for i in range(period)):
                consts = consts[:div]
                period = div
                break
        object.__setattr__(self, "period", period)
        object.__setattr__(self, "constituents", consts)

    @property
    def degree(self) -> int:
        """Max constituent degree; -1 for the zero quasipolynomial."""
        return max(len(c) - 1 for c in self.constituents)

    def evaluate(self, n: int) -> Fraction:
        return _poly_eval(self.constituents[n % self.period], n)

    def __call__(self, n: int) -> Fraction:
        return self.evaluate(n)

    def constituent_at(self, residue: int) -> Poly:
        return self.constituents[residue % self.period]

    def with_period(self, new_period: int) -> "Quasipolynomial":
        """Re-present with a multiple of the current period (the constructor
        normalizes, so the result's stored period is still minimal)."""
        if new_period % self.period:
            raise ValueError("new period must be a multiple of the current period")
        return Quasipolynomial(
            new_period, [self.constituents[i % self.period] for i in range(new_period)]
        )

    def add(self, other: "Quasipolynomial") -> "Quasipolynomial":
        p = lcm(self.period, other.period)
        return Quasipolynomial(
            p,
            [
                _poly_add(self.constituent_at(i), other.constituent_at(i))
                for i in range(p)
            ],
        )

    def __add__(self, other: "Quasipolynomial") -> "Quasipolynomial":
        return self.add(other)

    def scale(self, factor) -> "Quasipolynomial":
        f = Fraction(factor)
        return Quasipolynomial(
            self.period, [tuple(c * f for c in poly) for poly in self.constituents]
        )

    def equal_eventually(self, other: "Quasipolynomial") -> bool:
        """True iff the constituents agree after aligning to a common period."""
        p = lcm(self.period, other.period)
        return all(
            self.constituent_at(i) == other.constituent_at(i) for i in range(p)
        )

    @staticmethod
    def zero() -> "Quasipolynomial":
        return Quasipolynomial(1, [()])

    @staticmethod
    def constant(value) -> "Quasipolynomial":
        return Quasipolynomial(1, [(Fraction(value),)])

    def to_json_dict(self, onset: Optional[int] = None) -> dict:
        return {
            "period": self.period,
            "constituents": [
                [[str(c.numerator), str(c.denominator)] for c in poly]
                for poly in self.constituents
            ],
            "onset": 0 if onset is None else onset,
        }

    def to_json(self, onset: Optional[int] = None) -> str:
        return json.dumps(self.to_json_dict(onset))

    @staticmethod
    def from_json_dict(data: Mapping) -> "Quasipolynomial":
        consts = [
            [Fraction(int(num), int(den)) for num, den in poly]
            for poly in data["constituents"]
        ]
        return Quasipolynomial(int(data["period"]), consts)

    def __repr__(self) -> str:
        def fmt(poly: Poly) -> str:
            if not poly:
                return "0"
            return " + ".join(
                f"{c}*n^{i}" if i else str(c) for i, c in enumerate(poly) if c != 0
            ) or "0"

        body = "; ".join(fmt(c) for c in self.constituents)
        return f"Quasipolynomial(period={self.period}: {body})"


@dataclass(frozen=True)
class FittedQuasipolynomial:
    """A quasipolynomial plus the onset from which it matched the source data.

    The onset is empirical: it certifies agreement on ``validated_range``
    only, not a proof that the fit holds for every larger argument.
    """

    qp: Quasipolynomial
    onset: int
    validated_range: Tuple[int, int]

    def evaluate(self, n: int) -> Fraction:
        return self.qp.evaluate(n)

    def __call__(self, n: int) -> Fraction:
        return self.qp.evaluate(n)

    def to_json_dict(self) -> dict:
        d = self.qp.to_json_dict(self.onset)
        d["validated_range"] = list(self.validated_range)
        return d


def fit(
    seq: Mapping[int, int],
    max_period: int,
    max_degree: int,
    min_verify: int = 2,
) -> FittedQuasipolynomial:
    """Fit the minimal (period, degree, onset) quasipolynomial to an integer sequence.

    ``seq`` maps each n of a contiguous range to its value.  For each
    candidate, every residue class is interpolated exactly (rationally) on
    its first degree+1 points at or after the onset and verified on all
    remaining points of the range; a candidate needs at least
    ``min_verify`` verification points per class.  Least-squares is never
    used; a reported fit matched every in-range held-out point exactly.

    Raises NoFit (with the most advanced failure witness) when no candidate
    within the bounds matches.  Supplying at least
    (max_degree+2)*max_period*2 points guarantees every candidate has
    enough data to be tried.
    """
    if not seq:
        raise ValueError("empty sequence")
    ns = sorted(seq)
    if ns[-1] - ns[0] + 1 != len(ns):
        raise ValueError("sequence range must be contiguous")
    values = {n: Fraction(seq[n]) for n in ns}
    best_witness: Optional[dict] = None

    def witness_rank(w: dict) -> tuple:
        return (w.get("onset", -1), -w.get("period", 0))

    for period in range(1, max_period + 1):
        for degree in range(0, max_degree + 1):
            for onset in ns:
                by_class: Dict[int, List[int]] = {}
                for n in ns:
                    if n >= onset:
                        by_class.setdefault(n % period, []).append(n)
                if len(by_class) < period:
                    break  # larger onsets only lose classes
                ok = True
                failure: Optional[dict] = None
                consts: List[Poly] = [()] * period
                for r in range(period):
                    pts = by_class.get(r, [])
                    if len(pts) < degree + 1 + min_verify:
                        ok = False
                        failure = {
                            "period": period,
                            "degree": degree,
                            "onset": onset,
                            "residue": r,
                            "reason": "insufficient points",
                        }
                        break
                    train = pts[: degree + 1]
                    poly = _interpolate([(n, values[n]) for n in train])
                    for n in pts[degree + 1 :]:
                        if _poly_eval(poly, n) != values[n]:
                            ok = False
                            failure = {
                                "period": period,
                                "degree": degree,
                                "onset": onset,
                                "residue": r,
                                "n": n,
                                "expected": str(values[n]),
                                "actual": str(_poly_eval(poly, n)),
                            }
                            break
                    if not ok:
                        break
                    consts[r] = poly
                if ok:
                    qp = Quasipolynomial(period, consts)
                    # paranoia: the fit must reproduce every point at or after onset
                    for n in ns:
                        if n >= onset and qp.evaluate(n) != values[n]:
                            raise AssertionError("internal fit verification failed")
                    return FittedQuasipolynomial(qp, onset, (onset, ns[-1]))
                if failure is not None and (
                    best_witness is None or witness_rank(failure) > witness_rank(best_witness)
                ):
                    best_witness = failure
    raise NoFit(
        f"no quasipolynomial with period <= {max_period}, degree <= {max_degree} "
        f"matches the sequence on n in [{ns[0]}, {ns[-1]}]",
        best_witness,
    )


def fit_sequence(
    values: Sequence[int], start: int, max_period: int, max_degree: int
) -> FittedQuasipolynomial:
    """Convenience wrapper: fit values[i] taken at n = start + i."""
    return fit({start + i: v for i, v in enumerate(values)}, max_period, max_degree)


def read_sequence_csv(path) -> Dict[int, int]:
    """Read an ``n,count`` CSV (header required) into a dict."""
    out: Dict[int, int] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["n", "count"]:
            raise ValueError("expected CSV header 'n,count'")
        for row in reader:
            out[int(row["n"])] = int(row["count"])
    return out


def write_sequence_csv(path, seq: Mapping[int, int]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "count"])
        for n in sorted(seq):
            writer.writerow([n, str(seq[n])])
