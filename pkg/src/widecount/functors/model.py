"""Model functor presentations: pairs (injection, word) modulo a black-box
equivalence oracle satisfying the three pull-back axioms.

A pair on ground set [n] is an injection sigma: [s0] -> [n] together with a
word alpha over [k] on the remaining positions, whose letter counts lie in a
downward-closed set.  Builtin presentations also expose the count-vector
shadow of their oracle (the set of count vectors realized within one
equivalence class), which powers the groupoid-based counting route.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from ..actions import PermGroup, TooLarge, UnionFind
from ..lattice import DownwardClosedSet
from .elementary import ElementaryModelFunctor

Vector = Tuple[int, ...]
CLASS_BUDGET = 10**6


@dataclass(frozen=True)
class MFPair:
    """A pair (sigma, alpha) on ground set [n].

    ``sigma`` lists the images of 1..s0 (distinct positions); ``alpha``
    lists the letters on the positions of [n] minus the sigma image, in
    increasing position order.
    """

    n: int
    sigma: Tuple[int, ...]
    alpha: Tuple[int, ...]

    def __post_init__(self):
        if len(set(self.sigma)) != len(self.sigma):
            raise ValueError("sigma is not injective")
        if any(not 1 <= p <= self.n for p in self.sigma):
            raise ValueError("sigma image out of range")
        if len(self.alpha) != self.n - len(self.sigma):
            raise ValueError("alpha length mismatch")

    @property
    def domain(self) -> Tuple[int, ...]:
        """Positions where alpha is defined, ascending."""
        image = set(self.sigma)
        return tuple(p for p in range(1, self.n + 1) if p not in image)

    def letters(self) -> Dict[int, int]:
        return dict(zip(self.domain, self.alpha))

    def letter_at(self, pos: int) -> Optional[int]:
        image = set(self.sigma)
        if pos in image:
            return None
        idx = sum(1 for p in range(1, pos) if p not in image)
        return self.alpha[idx]

    def count_vector(self, k: int) -> Vector:
        counts = [0] * k
        for c in self.alpha:
            counts[c - 1] += 1
        return tuple(counts)


def apply_injection(pair: MFPair, images: Sequence[int], n_target: int) -> Optional[MFPair]:
    """The contravariant map F(pi) for the injection pi: [m] -> [n_target].

    ``images`` lists (pi(1), ..., pi(m)); the result lives on [m].  Returns
    None when the sigma image is not inside the image of pi.
    """
    if pair.n != n_target:
        raise ValueError("pair ground set does not match the injection target")
    m = len(images)
    preimage = {p: j for j, p in enumerate(images, start=1)}
    sigma_new = []
    for p in pair.sigma:
        j = preimage.get(p)
        if j is None:
            return None
        sigma_new.append(j)
    letters = pair.letters()
    sigma_set = set(sigma_new)
    alpha_new = tuple(letters[images[j - 1]] for j in range(1, m + 1) if j not in sigma_set)
    return MFPair(m, tuple(sigma_new), alpha_new)


def apply_permutation(pair: MFPair, images: Sequence[int]) -> MFPair:
    """F(pi) for a permutation of the ground set (always defined)."""
    out = apply_injection(pair, images, pair.n)
    assert out is not None
    return out


def transposed(pair: MFPair, i: int, j: int) -> MFPair:
    """F((i j)) applied to the pair."""
    images = list(range(1, pair.n + 1))
    images[i - 1], images[j - 1] = j, i
    return apply_permutation(pair, images)


EqOracle = Callable[[int, MFPair, MFPair], bool]
CountEquivalents = Callable[[Vector], FrozenSet[Vector]]


@dataclass(frozen=True)
class ModelFunctorPresentation:
    """(s0, k, countset, equivalence oracle) with optional count-vector shadow.

    ``eq(n, pair1, pair2)`` decides equivalence of pairs on [n]; it must be
    an equivalence relation satisfying the pull-back axioms (checked
    exhaustively at small n by verify_axioms).  ``count_equivalents`` maps
    the count vector of a pair's word to the set of count vectors realized
    across that pair's equivalence class; builtin presentations supply it,
    user presentations may not.
    """

    name: str
    s0: int
    k: int
    countset: DownwardClosedSet
    eq: EqOracle = field(compare=False)
    provenance: str = "user"
    count_equivalents: Optional[CountEquivalents] = field(default=None, compare=False)

    def words(self, length: int) -> Iterable[Tuple[int, ...]]:
        """All words of the given length whose count vector is in the count set."""
        if self.countset.is_empty():
            return
        counts = [0] * self.k

        def admissible(letter: int) -> bool:
            counts[letter - 1] += 1
            ok = self.countset.membership(tuple(counts))
            counts[letter - 1] -= 1
            return ok

        def rec(prefix: List[int]):
            if len(prefix) == length:
                yield tuple(prefix)
                return
            for letter in range(1, self.k + 1):
                if admissible(letter):
                    counts[letter - 1] += 1
                    prefix.append(letter)
                    yield from rec(prefix)
                    prefix.pop()
                    counts[letter - 1] -= 1

        yield from rec([])

    def pairs(self, n: int) -> Iterable[MFPair]:
        """All of F([n])."""
        if n < self.s0:
            return
        word_list = list(self.words(n - self.s0))
        for sigma in permutations(range(1, n + 1), self.s0):
            for word in word_list:
                yield MFPair(n, sigma, word)

    def pair_count(self, n: int) -> int:
        if n < self.s0:
            return 0
        words = sum(1 for _ in self.words(n - self.s0))
        injections = 1
        for i in range(self.s0):
            injections *= n - i
        return words * injections

    def canonical_pair(self, beta: Vector, n: Optional[int] = None) -> MFPair:
        """A standard pair whose word has count vector beta: sigma first, letters sorted."""
        total = sum(beta)
        n = total + self.s0 if n is None else n
        word = []
        for letter, mult in enumerate(beta, start=1):
            word.extend([letter] * mult)
        return MFPair(n, tuple(range(1, self.s0 + 1)), tuple(word))


# ---------------------------------------------------------------------------
# classes and direct orbit counting
# ---------------------------------------------------------------------------


def mf_classes(pres: ModelFunctorPresentation, n: int, budget: int = CLASS_BUDGET) -> List[List[MFPair]]:
    """The equivalence classes of F([n]) by oracle grouping.

    Uses the count-vector shadow to bucket candidates when available;
    within a bucket, pairs are grouped against class representatives.
    Transitivity of the oracle is a presentation invariant (see
    check_equivalence); grouping relies on it.
    """
    total = pres.pair_count(n)
    if total > budget:
        raise TooLarge(f"|F([{n}])| = {total} exceeds the class budget {budget}")

    def bucket_key(pair: MFPair):
        if pres.count_equivalents is None:
            return 0
        return min(pres.count_equivalents(pair.count_vector(pres.k)))

    buckets: Dict[object, List[MFPair]] = {}
    for pair in pres.pairs(n):
        buckets.setdefault(bucket_key(pair), []).append(pair)

    classes: List[List[MFPair]] = []
    for key in sorted(buckets):
        reps: List[Tuple[MFPair, int]] = []
        for pair in buckets[key]:
            for rep, idx in reps:
                if pres.eq(n, pair, rep):
                    classes[idx].append(pair)
                    break
            else:
                classes.append([pair])
                reps.append((pair, len(classes) - 1))
    return classes


def mf_orbit_count_direct(pres: ModelFunctorPresentation, n: int, budget: int = CLASS_BUDGET) -> int:
    """Number of Sym([n])-orbits on F([n]) / ~, via explicit classes."""
    if n < pres.s0:
        return 0
    classes = mf_classes(pres, n, budget)
    if not classes:
        return 0
    class_of: Dict[MFPair, int] = {}
    for idx, cls in enumerate(classes):
        for pair in cls:
            class_of[pair] = idx
    uf = UnionFind(range(len(classes)))
    generators: List[List[int]] = []
    if n >= 2:
        swap = list(range(1, n + 1))
        swap[0], swap[1] = 2, 1
        generators.append(swap)
        generators.append(list(range(2, n + 1)) + [1])
    for images in generators:
        for pair, idx in class_of.items():
            uf.union(idx, class_of[apply_permutation(pair, images)])
    return len(uf.blocks())


def check_equivalence(pres: ModelFunctorPresentation, n: int, budget: int = 3000) -> Optional[dict]:
    """Exhaustively check that eq is an equivalence relation on F([n]).

    Returns None when fine, else a witness dict.  Also verifies the oracle
    agrees with its own transitive closure.
    """
    pairs = list(pres.pairs(n))
    if len(pairs) > budget:
        raise TooLarge(f"|F([{n}])| = {len(pairs)} exceeds the check budget")
    for p in pairs:
        if not pres.eq(n, p, p):
            return {"axiom": "reflexive", "witness": (p,)}
    uf = UnionFind(pairs)
    for a, b in combinations(pairs, 2):
        ab, ba = pres.eq(n, a, b), pres.eq(n, b, a)
        if ab != ba:
            return {"axiom": "symmetric", "witness": (a, b)}
        if ab:
            uf.union(a, b)
    for a, b in combinations(pairs, 2):
        if (uf.find(a) == uf.find(b)) != pres.eq(n, a, b):
            return {"axiom": "transitive (closure disagrees)", "witness": (a, b)}
    return None


@dataclass
class AxiomReport:
    passed: bool
    failures: List[dict]
    checked_n: List[int]

    def first_witness(self) -> Optional[dict]:
        return self.failures[0] if self.failures else None


def _classes_with_index(pres: ModelFunctorPresentation, n: int):
    pairs = list(pres.pairs(n))
    uf = UnionFind(pairs) if pairs else None
    for a, b in combinations(pairs, 2):
        if pres.eq(n, a, b):
            uf.union(a, b)
    class_of: Dict[MFPair, int] = {}
    members: Dict[int, List[MFPair]] = {}
    if uf is not None:
        roots: Dict[MFPair, int] = {}
        for p in pairs:
            root = uf.find(p)
            idx = roots.setdefault(root, len(roots))
            class_of[p] = idx
            members.setdefault(idx, []).append(p)
    return pairs, class_of, members


def verify_axioms(pres: ModelFunctorPresentation, n_max: int, max_failures: int = 1) -> AxiomReport:
    """Exhaustively check the three model-functor axioms for all ground sets
    up to n_max and all injections between them; stops after max_failures.

    Axiom (2) is checked in its set form: the class of a pushed-down pair
    must equal the push-down of the class members whose concealed image
    fits inside the injection.
    """
    failures: List[dict] = []
    checked = []

    def record(axiom: str, **info) -> bool:
        failures.append({"axiom": axiom, **info})
        return len(failures) >= max_failures

    by_size = {}
    for t in range(n_max + 1):
        checked.append(t)
        witness = check_equivalence(pres, t)
        if witness is not None:
            if record("equivalence:" + witness["axiom"], n=t, witness=witness["witness"]):
                return AxiomReport(False, failures, checked)
        by_size[t] = _classes_with_index(pres, t)

    for t in range(n_max + 1):
        pairs_t, class_t, members_t = by_size[t]
        # Axiom (3): equality patterns agree outside both sigma images
        for cls in members_t.values():
            for a, b in combinations(cls, 2):
                outside = [
                    p for p in range(1, t + 1) if p not in set(a.sigma) | set(b.sigma)
                ]
                la, lb = a.letters(), b.letters()
                for i, j in combinations(outside, 2):
                    if (la[i] == la[j]) != (lb[i] == lb[j]):
                        if record("axiom3", n=t, witness=(a, b, i, j)):
                            return AxiomReport(False, failures, checked)
        for s in range(t + 1):
            _, class_s, members_s = by_size[s]
            for images in permutations(range(1, t + 1), s):
                im_set = set(images)
                # Axiom (1): pushed equivalent pairs stay equivalent
                for cls in members_t.values():
                    pushed_ids = set()
                    eligible = [a for a in cls if set(a.sigma) <= im_set]
                    for a in eligible:
                        pushed_ids.add(class_s[apply_injection(a, images, t)])
                    if len(pushed_ids) > 1:
                        if record("axiom1", n=t, s=s, injection=images, witness=tuple(eligible[:2])):
                            return AxiomReport(False, failures, checked)
                    # Axiom (2): everything equivalent to a push-down is a push-down
                    if eligible:
                        pushed = {apply_injection(a, images, t) for a in eligible}
                        target_class = members_s[next(iter(pushed_ids))]
                        missing = [p for p in target_class if p not in pushed]
                        if missing:
                            if record(
                                "axiom2", n=t, s=s, injection=images,
                                witness=(eligible[0], missing[0]),
                            ):
                                return AxiomReport(False, failures, checked)
    return AxiomReport(not failures, failures, checked)


# ---------------------------------------------------------------------------
# builtin presentations
# ---------------------------------------------------------------------------


def roots_of_unity(d: int) -> ModelFunctorPresentation:
    """The builtin presentation for components of x_i^d = x_j^d.

    s0 = 1, alphabet [d] identified with Z/dZ (letter d is the zero
    residue).  Two pairs are equivalent iff they present the same
    component: with concealed positions j0 != j0', the revealed letter at
    j0 must be minus the old letter at j0', and all shared letters shift by
    that amount.
    """

    def res(letter: int) -> int:
        return letter % d

    def letter_of(r: int) -> int:
        r %= d
        return d if r == 0 else r

    def eq(n: int, p1: MFPair, p2: MFPair) -> bool:
        if p1 == p2:
            return True
        j0, j0p = p1.sigma[0], p2.sigma[0]
        if j0 == j0p:
            return False
        l1, l2 = p1.letters(), p2.letters()
        shift = res(l2[j0])
        if res(l1[j0p]) != (-shift) % d:
            return False
        for j in range(1, n + 1):
            if j in (j0, j0p):
                continue
            if res(l2[j]) != (res(l1[j]) + shift) % d:
                return False
        return True

    def count_equivalents(beta: Vector) -> FrozenSet[Vector]:
        out = {beta}
        for letter in range(1, d + 1):
            if beta[letter - 1] == 0:
                continue
            shift = (-res(letter)) % d
            reduced = list(beta)
            reduced[letter - 1] -= 1
            shifted = [0] * d
            for m in range(1, d + 1):
                shifted[m - 1] = reduced[letter_of(res(m) - shift) - 1]
            shifted[letter_of(shift) - 1] += 1
            out.add(tuple(shifted))
        return frozenset(out)

    return ModelFunctorPresentation(
        name=f"roots-of-unity-{d}",
        s0=1,
        k=d,
        countset=DownwardClosedSet.full(d),
        eq=eq,
        provenance="builtin",
        count_equivalents=count_equivalents,
    )


def elementary_embedding(emf: ElementaryModelFunctor) -> ModelFunctorPresentation:
    """An elementary model functor as a presentation with s0 = 0: classes are
    orbits of the letter group acting on words."""

    group = emf.group

    def eq(n: int, p1: MFPair, p2: MFPair) -> bool:
        return any(tuple(g(c) for c in p1.alpha) == p2.alpha for g in group)

    def count_equivalents(beta: Vector) -> FrozenSet[Vector]:
        out = set()
        for g in group:
            out.add(tuple(beta[g.inverse()(m) - 1] for m in range(1, emf.k + 1)))
        return frozenset(out)

    return ModelFunctorPresentation(
        name=f"elementary-k{emf.k}",
        s0=0,
        k=emf.k,
        countset=emf.countset,
        eq=eq,
        provenance="builtin",
        count_equivalents=count_equivalents,
    )


def trivial_presentation(k: int, s0: int = 0, countset: Optional[DownwardClosedSet] = None) -> ModelFunctorPresentation:
    """Equivalence is equality; the finest possible oracle."""
    return ModelFunctorPresentation(
        name=f"trivial-k{k}-s{s0}",
        s0=s0,
        k=k,
        countset=DownwardClosedSet.full(k) if countset is None else countset,
        eq=lambda n, a, b: a == b,
        provenance="builtin",
        count_equivalents=lambda beta: frozenset({beta}),
    )


def broken_symmetry_presentation(d: int) -> ModelFunctorPresentation:
    """Negative control: the roots-of-unity oracle with symmetry destroyed."""
    base = roots_of_unity(d)

    def eq(n: int, p1: MFPair, p2: MFPair) -> bool:
        if p1 == p2:
            return True
        return base.eq(n, p1, p2) and p1.sigma[0] <= p2.sigma[0]

    return ModelFunctorPresentation(
        name=f"broken-symmetry-{d}",
        s0=1,
        k=d,
        countset=DownwardClosedSet.full(d),
        eq=eq,
        provenance="builtin",
        count_equivalents=base.count_equivalents,
    )


def broken_axiom3_presentation() -> ModelFunctorPresentation:
    """Negative control: a genuine equivalence relation (equal sorted count
    vectors) that violates the equality-pattern axiom."""

    def eq(n: int, p1: MFPair, p2: MFPair) -> bool:
        return tuple(sorted(p1.count_vector(2))) == tuple(sorted(p2.count_vector(2)))

    def count_equivalents(beta: Vector) -> FrozenSet[Vector]:
        return frozenset({beta, (beta[1], beta[0])})

    return ModelFunctorPresentation(
        name="broken-axiom3",
        s0=0,
        k=2,
        countset=DownwardClosedSet.full(2),
        eq=eq,
        provenance="builtin",
        count_equivalents=count_equivalents,
    )
