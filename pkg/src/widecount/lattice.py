"""Downward-closed subsets of Z_{>=0}^k and exact lattice-point level counting.

A downward-closed set is stored by the antichain of minimal vectors of its
complement ("obstructions"): beta belongs iff no obstruction is <= beta
componentwise.  Stanley decomposition splits such a set into disjoint
translated coordinate cones; per-level counts then reduce to weighted
denumerants computed by an exact integer DP.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from math import lcm
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .actions import Permutation
from .quasipoly import FittedQuasipolynomial, Quasipolynomial, fit

Vector = Tuple[int, ...]


def _leq(a: Vector, b: Vector) -> bool:
    return all(x <= y for x, y in zip(a, b))


def antichain_reduce(vectors: Iterable[Vector]) -> Tuple[Vector, ...]:
    """Keep only the componentwise-minimal vectors, sorted for determinism."""
    vecs = sorted(set(tuple(v) for v in vectors))
    keep = []
    for v in vecs:
        if not any(_leq(w, v) for w in vecs if w != v):
            keep.append(v)
    return tuple(keep)


@dataclass(frozen=True)
class DownwardClosedSet:
    """Subset of Z_{>=0}^k closed under decreasing coordinates."""

    k: int
    obstructions: Tuple[Vector, ...]

    def __init__(self, k: int, obstructions: Iterable[Vector] = ()):
        obs = []
        for o in obstructions:
            o = tuple(int(x) for x in o)
            if len(o) != k or any(x < 0 for x in o):
                raise ValueError(f"bad obstruction {o} for dimension {k}")
            obs.append(o)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "obstructions", antichain_reduce(obs))

    @staticmethod
    def full(k: int) -> "DownwardClosedSet":
        return DownwardClosedSet(k, ())

    @staticmethod
    def empty(k: int) -> "DownwardClosedSet":
        return DownwardClosedSet(k, ((0,) * k,))

    def __contains__(self, beta: Sequence[int]) -> bool:
        return self.membership(beta)

    def membership(self, beta: Sequence[int]) -> bool:
        beta = tuple(beta)
        if len(beta) != self.k:
            raise ValueError("dimension mismatch")
        return not any(_leq(o, beta) for o in self.obstructions)

    def is_empty(self) -> bool:
        return bool(self.obstructions) and self.obstructions[0] == (0,) * self.k

    def is_full(self) -> bool:
        return not self.obstructions

    def is_finite(self) -> bool:
        """Finite iff every coordinate is capped by a single-coordinate obstruction."""
        if self.is_empty():
            return True
        capped = set()
        for o in self.obstructions:
            support = [j for j, x in enumerate(o) if x > 0]
            if len(support) <= 1:
                capped.update(support if support else range(self.k))
        return self.k == 0 or capped == set(range(self.k))

    def intersect(self, other: "DownwardClosedSet") -> "DownwardClosedSet":
        if self.k != other.k:
            raise ValueError("dimension mismatch")
        return DownwardClosedSet(self.k, self.obstructions + other.obstructions)

    def remove_cone(self, base: Vector) -> "DownwardClosedSet":
        """The downward-closed set minus the full upper cone at ``base``."""
        return DownwardClosedSet(self.k, self.obstructions + (tuple(base),))

    def enumerate_level(self, n: int) -> List[Vector]:
        """All members of total degree n (brute force; test oracle)."""
        out: List[Vector] = []

        def rec(prefix: List[int], remaining: int) -> None:
            if len(prefix) == self.k - 1:
                v = tuple(prefix + [remaining])
                if self.membership(v):
                    out.append(v)
                return
            for x in range(remaining + 1):
                rec(prefix + [x], remaining - x)

        if self.k == 0:
            return [()] if n == 0 else []
        rec([], n)
        return out

    def to_json_dict(self) -> dict:
        return {"k": self.k, "obstructions": [list(o) for o in self.obstructions]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @staticmethod
    def from_json(data) -> "DownwardClosedSet":
        if isinstance(data, str):
            data = json.loads(data)
        return DownwardClosedSet(int(data["k"]), [tuple(o) for o in data.get("obstructions", [])])

    def __repr__(self) -> str:
        return f"DownwardClosedSet(k={self.k}, obstructions={list(self.obstructions)})"


@dataclass(frozen=True)
class StanleyPiece:
    """The translated coordinate cone offset + Z_{>=0}^free."""

    offset: Vector
    free: FrozenSet[int]  # 0-based coordinate indices

    def contains(self, beta: Vector) -> bool:
        return all(
            beta[j] >= self.offset[j] if j in self.free else beta[j] == self.offset[j]
            for j in range(len(self.offset))
        )


def stanley_decompose(M: DownwardClosedSet) -> List[StanleyPiece]:
    """Disjoint cover of M by translated coordinate cones.

    Recursive coordinate splitting: pick the lowest free coordinate j with a
    positive entry in some live obstruction; freeze x_j = v for each v below
    the largest such entry, and when no obstruction is supported on j alone,
    emit the tail x_j >= max with j freed.  Deterministic; piece count is
    canonical but not necessarily minimal.
    """
    k = M.k

    def rec(offset: Vector, free: FrozenSet[int], obstructions: List[Vector]) -> List[StanleyPiece]:
        live: List[Vector] = []
        for o in obstructions:
            # an obstruction is unsatisfiable in this slice if it demands more
            # than the frozen value at a frozen coordinate
            if any(j not in free and o[j] > offset[j] for j in range(k)):
                continue
            live.append(o)
        proj = [tuple(o[j] if j in free else 0 for j in range(k)) for o in live]
        if any(all(x == 0 for x in p) for p in proj):
            return []  # some obstruction is fully satisfied: slice is empty
        if not proj:
            return [StanleyPiece(offset, free)]
        j = min(jj for jj in sorted(free) if any(p[jj] > 0 for p in proj))
        m = max(p[j] for p in proj)
        out: List[StanleyPiece] = []
        for v in range(m):
            new_offset = offset[:j] + (v,) + offset[j + 1 :]
            out.extend(rec(new_offset, free - {j}, live))
        if not any(p[j] > 0 and all(x == 0 for jj, x in enumerate(p) if jj != j) for p in proj):
            # tail x_j >= m: the j-entries of all obstructions are met, so
            # drop coordinate j from the constraints and free it at offset m
            tail_offset = offset[:j] + (m,) + offset[j + 1 :]
            tail_obs = [tuple(0 if jj == j else o[jj] for jj in range(k)) for o in live]
            for piece in rec(tail_offset, free - {j}, tail_obs):
                out.append(StanleyPiece(piece.offset, piece.free | {j}))
        return out

    if M.is_empty():
        return []
    return rec((0,) * k, frozenset(range(k)), list(M.obstructions))


@dataclass(frozen=True)
class WeightedLevelProblem:
    """Count vectors in a downward-closed feasible set at a weighted level.

    ``weights`` are positive integers; the level of y is sum_c weights[c]*y[c].
    """

    weights: Tuple[int, ...]
    feasible: DownwardClosedSet

    def __init__(self, weights: Sequence[int], feasible: DownwardClosedSet):
        weights = tuple(int(w) for w in weights)
        if any(w < 1 for w in weights):
            raise ValueError("weights must be positive")
        if len(weights) != feasible.k:
            raise ValueError("dimension mismatch")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "feasible", feasible)

    @property
    def dimension(self) -> int:
        return len(self.weights)


_DENUMERANT_CACHE: Dict[Tuple[int, ...], List[int]] = {}


def denumerant(weights: Sequence[int], n: int) -> int:
    """Number of y >= 0 with sum weights[c]*y[c] = n, exact integer DP."""
    if n < 0:
        return 0
    key = tuple(sorted(int(w) for w in weights))
    table = _DENUMERANT_CACHE.get(key)
    if table is None or len(table) <= n:
        size = max(n + 1, 64)
        table = [0] * size
        table[0] = 1
        for w in key:
            for j in range(w, size):
                table[j] += table[j - w]
        _DENUMERANT_CACHE[key] = table
    return table[n]


def count_level(problem: WeightedLevelProblem, n: int) -> int:
    """Exact number of feasible y at weighted level n, via Stanley pieces."""
    total = 0
    for piece in stanley_decompose(problem.feasible):
        base = sum(problem.weights[j] * piece.offset[j] for j in range(problem.dimension))
        free_weights = [problem.weights[j] for j in sorted(piece.free)]
        total += denumerant(free_weights, n - base)
    return total


def cycle_contract(M: DownwardClosedSet, g: Permutation) -> WeightedLevelProblem:
    """Restrict M to the g-fixed vectors, contracted along the cycles of g.

    Fixed vectors are constant on cycles; the contraction sends a fixed beta
    to y with y_c the common value on cycle c.  Membership transfers with
    obstruction o mapped to max over each cycle, and degree |beta| becomes
    the weighted level sum of cycle lengths times y.
    """
    if g.degree != M.k:
        raise ValueError("permutation degree must match dimension")
    cycles = g.cycles(include_fixed=True)
    weights = [len(c) for c in cycles]
    contracted = []
    for o in M.obstructions:
        contracted.append(tuple(max(o[j - 1] for j in c) for c in cycles))
    return WeightedLevelProblem(weights, DownwardClosedSet(len(cycles), contracted))


def contract_vector(beta: Vector, g: Permutation) -> Optional[Vector]:
    """Image of a g-fixed vector under cycle contraction; None if not fixed."""
    cycles = g.cycles(include_fixed=True)
    out = []
    for c in cycles:
        vals = {beta[j - 1] for j in c}
        if len(vals) != 1:
            return None
        out.append(vals.pop())
    return tuple(out)


def expand_vector(y: Vector, g: Permutation) -> Vector:
    """Inverse of contract_vector on fixed vectors."""
    cycles = g.cycles(include_fixed=True)
    beta = [0] * g.degree
    for value, c in zip(y, cycles):
        for j in c:
            beta[j - 1] = value
    return tuple(beta)


def fixed_count_level(M: DownwardClosedSet, g: Permutation, n: int) -> int:
    """|{beta in M at degree n with g.beta = beta}| via cycle contraction."""
    return count_level(cycle_contract(M, g), n)


def level_quasipolynomial(M: DownwardClosedSet, g: Permutation) -> FittedQuasipolynomial:
    """Quasipolynomial n -> |M_n^g|, validated on a window twice the fit window.

    The window is sized so the fitted answer provably equals the true count
    for every n: the true function is a quasipolynomial with period dividing
    lcm(cycle lengths), degree below the cycle count, and onset at most the
    largest Stanley-piece base level.
    """
    problem = cycle_contract(M, g)
    if problem.feasible.is_empty():
        return FittedQuasipolynomial(Quasipolynomial.zero(), 0, (0, 0))
    pieces = stanley_decompose(problem.feasible)
    max_degree = max((len(p.free) for p in pieces), default=1)
    period = lcm(*problem.weights) if problem.weights else 1
    onset_bound = max(
        (sum(problem.weights[j] * p.offset[j] for j in range(problem.dimension)) for p in pieces),
        default=0,
    )
    window = onset_bound + 2 * (max_degree + 2) * period * 2 + 2 * period
    counts = {n: count_level(problem, n) for n in range(window + 1)}
    return fit(counts, max_period=period, max_degree=max_degree)
