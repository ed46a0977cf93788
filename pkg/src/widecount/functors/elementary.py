"""Elementary model functors: words over [k] with constrained letter counts, modulo
a subgroup of Sym([k]) acting on letters and Sym(positions).

Counting is the averaged fixed-vector count over the letter group, with each
fixed-vector count a weighted level count after cycle contraction; the brute
route enumerates words and dedups by canonical form.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import List

from ..actions import PermGroup, TooLarge, canonical_form
from ..lattice import DownwardClosedSet, count_level, cycle_contract, level_quasipolynomial
from ..quasipoly import FittedQuasipolynomial, Quasipolynomial

BRUTE_BUDGET = 10**7


@dataclass(frozen=True)
class ElementaryModelFunctor:
    """Alphabet size k, letter group G <= Sym([k]), and a G-stable count set."""

    k: int
    group: PermGroup
    countset: DownwardClosedSet

    def __init__(self, k: int, group: PermGroup, countset: DownwardClosedSet):
        if group.degree != k or countset.k != k:
            raise ValueError("alphabet size, group degree, and count set dimension must agree")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "countset", countset)
        self._check_stability()

    def _check_stability(self) -> None:
        # G permutes coordinates, so M is G-stable iff its obstruction
        # antichain is; additionally sweep the obstruction box for a direct
        # membership witness when it is not
        obs = set(self.countset.obstructions)
        for g in self.group.generators:
            permuted = {tuple(o[g(j) - 1] for j in range(1, self.k + 1)) for o in obs}
            if permuted != obs:
                box = [max(o[j] for o in self.countset.obstructions) for j in range(self.k)]
                witness = None
                for beta in product(*(range(b + 1) for b in box)):
                    gbeta = tuple(beta[g(j) - 1] for j in range(1, self.k + 1))
                    if self.countset.membership(beta) != self.countset.membership(gbeta):
                        witness = (beta, gbeta)
                        break
                raise ValueError(
                    f"count set is not G-stable under {g.cycle_string()}: witness {witness}"
                )


def elementary_count(emf: ElementaryModelFunctor, n: int) -> int:
    """Number of Sym(n)-orbits on E([n])/G, by averaged fixed-vector counts."""
    total = Fraction(0)
    for g in emf.group:
        total += count_level(cycle_contract(emf.countset, g), n)
    total /= emf.group.order
    if total.denominator != 1:
        raise AssertionError("orbit count came out non-integer")
    return int(total)


def elementary_quasipolynomial(emf: ElementaryModelFunctor) -> FittedQuasipolynomial:
    """The counting quasipolynomial, averaged over the group and revalidated."""
    acc = Quasipolynomial.zero()
    onset = 0
    for g in emf.group:
        part = level_quasipolynomial(emf.countset, g)
        acc = acc.add(part.qp)
        onset = max(onset, part.onset)
    acc = acc.scale(Fraction(1, emf.group.order))
    window = onset + 2 * acc.period * (max(acc.degree, 0) + 2) + 4
    for n in range(onset, window):
        if acc.evaluate(n) != elementary_count(emf, n):
            raise AssertionError(f"quasipolynomial validation failed at n={n}")
    return FittedQuasipolynomial(acc, onset, (onset, window - 1))


def elementary_brute(emf: ElementaryModelFunctor, n: int) -> int:
    """Oracle: enumerate words, filter by count vector, dedup by canonical form."""
    if emf.k**n > BRUTE_BUDGET:
        raise TooLarge(f"{emf.k}^{n} words exceed the brute-force budget")
    seen = set()
    for word in product(range(1, emf.k + 1), repeat=n):
        counts = [0] * emf.k
        for c in word:
            counts[c - 1] += 1
        if not emf.countset.membership(tuple(counts)):
            continue
        # position group None means the full symmetric group (sort fast path)
        seen.add(canonical_form(word, position_group=None, alphabet_group=emf.group))
    return len(seen)


def all_subgroups(k: int) -> List[PermGroup]:
    """Every subgroup of Sym(k), for tiny k (test support)."""
    full = PermGroup.symmetric(k)
    elements = list(full)
    found = {}
    # closure of every subset of elements is wasteful but fine for k <= 3;
    # use subsets of size <= 2 as generating sets (enough for k <= 4)
    from itertools import combinations

    for size in (0, 1, 2):
        for gens in combinations(elements, size):
            grp = PermGroup(k, list(gens))
            found[frozenset(grp.elements)] = grp
    return sorted(found.values(), key=lambda g: (g.order, [p.images for p in g.elements]))
