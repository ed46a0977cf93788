"""Linear codes over small finite fields up to permutation, scaling, and
field-automorphism equivalence.

A code is identified, up to base change, with the multiset of projective
classes of its generator columns (zero columns map to the distinguished
zero point).  Equivalence classes of codes then correspond to orbits of
the projective semilinear group (with zero) on spanning multisets, which
both the direct canonical-form route and the orbit-counting route use.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .actions import TooLarge
from .lattice import denumerant
from .quasipoly import FittedQuasipolynomial, fit

Element = int
Vector = Tuple[Element, ...]

# Conway-style defining polynomials: x^f = poly in lower powers, coefficients
# listed for 1, x, ..., x^(f-1)
_DEFINING = {
    (2, 2): (1, 1),  # x^2 = 1 + x
    (2, 3): (1, 1, 0),  # x^3 = 1 + x
    (3, 2): (1, 1),  # x^2 = 1 + x  (x^2 + 2x + 2 = 0)
}


class FiniteField:
    """F_q for q = p^f <= 9, backed by full addition/multiplication tables.

    Elements are integers 0..q-1 encoding polynomial coefficients base p.
    The field axioms are verified on the tables at construction, and the
    Frobenius x -> x^p generates the automorphism group of order f.
    """

    def __init__(self, q: int):
        factorization = _prime_power(q)
        if factorization is None or q > 9:
            raise ValueError(f"q must be a prime power <= 9, got {q}")
        self.q = q
        self.p, self.f = factorization
        p, f = self.p, self.f

        def to_poly(x: int) -> Tuple[int, ...]:
            return tuple((x // p**i) % p for i in range(f))

        def from_poly(cs: Sequence[int]) -> int:
            return sum((c % p) * p**i for i, c in enumerate(cs))

        def poly_add(a, b):
            return tuple((x + y) % p for x, y in zip(a, b))

        def poly_mul(a, b):
            raw = [0] * (2 * f - 1)
            for i, x in enumerate(a):
                for j, y in enumerate(b):
                    raw[i + j] = (raw[i + j] + x * y) % p
            reduction = _DEFINING.get((p, f))
            for deg in range(2 * f - 2, f - 1, -1):
                c = raw[deg]
                if c:
                    raw[deg] = 0
                    for i, r in enumerate(reduction):
                        raw[deg - f + i] = (raw[deg - f + i] + c * r) % p
            return tuple(raw[:f])

        self.add_table = tuple(
            tuple(from_poly(poly_add(to_poly(a), to_poly(b))) for b in range(q))
            for a in range(q)
        )
        self.mul_table = tuple(
            tuple(from_poly(poly_mul(to_poly(a), to_poly(b))) for b in range(q))
            for a in range(q)
        )
        self.neg_table = tuple(
            next(b for b in range(q) if self.add_table[a][b] == 0) for a in range(q)
        )
        self.inv_table = (None,) + tuple(
            next(b for b in range(1, q) if self.mul_table[a][b] == 1)
            for a in range(1, q)
        )
        self.frobenius = tuple(self._pow(a, self.p) for a in range(q))
        self._validate()

    def _pow(self, a: int, e: int) -> int:
        out = 1
        for _ in range(e):
            out = self.mul_table[out][a]
        return out

    def _validate(self) -> None:
        q = self.q
        rng = range(q)
        for a in rng:
            if self.add_table[a][0] != a or self.mul_table[a][1] != a:
                raise AssertionError("identity axioms fail")
            if self.mul_table[a][0] != 0:
                raise AssertionError("zero absorbs fails")
        for a in rng:
            for b in rng:
                if self.add_table[a][b] != self.add_table[b][a]:
                    raise AssertionError("addition not commutative")
                if self.mul_table[a][b] != self.mul_table[b][a]:
                    raise AssertionError("multiplication not commutative")
        for a in rng:
            for b in rng:
                for c in rng:
                    if self.add_table[self.add_table[a][b]][c] != self.add_table[a][self.add_table[b][c]]:
                        raise AssertionError("addition not associative")
                    if self.mul_table[self.mul_table[a][b]][c] != self.mul_table[a][self.mul_table[b][c]]:
                        raise AssertionError("multiplication not associative")
                    lhs = self.mul_table[a][self.add_table[b][c]]
                    rhs = self.add_table[self.mul_table[a][b]][self.mul_table[a][c]]
                    if lhs != rhs:
                        raise AssertionError("distributivity fails")
        # Frobenius is a field automorphism of order f
        automorphisms = self.automorphisms()
        if len(automorphisms) != self.f:
            raise AssertionError("automorphism count is not f")

    def add(self, a, b):
        return self.add_table[a][b]

    def mul(self, a, b):
        return self.mul_table[a][b]

    def neg(self, a):
        return self.neg_table[a]

    def sub(self, a, b):
        return self.add_table[a][self.neg_table[b]]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverting zero")
        return self.inv_table[a]

    def automorphisms(self) -> List[Tuple[int, ...]]:
        """Powers of Frobenius, as value tables; the identity comes first."""
        out = [tuple(range(self.q))]
        cur = tuple(range(self.q))
        for _ in range(self.f - 1):
            cur = tuple(self.frobenius[x] for x in cur)
            out.append(cur)
        return out

    def __repr__(self) -> str:
        return f"FiniteField(q={self.q})"


def _prime_power(q: int) -> Optional[Tuple[int, int]]:
    for p in (2, 3, 5, 7):
        if q % p == 0:
            f = 0
            m = q
            while m % p == 0:
                m //= p
                f += 1
            return (p, f) if m == 1 else None
    return None


@lru_cache(maxsize=None)
def field(q: int) -> FiniteField:
    return FiniteField(q)


# ---------------------------------------------------------------------------
# linear algebra over F_q
# ---------------------------------------------------------------------------


def rref(F: FiniteField, rows: Sequence[Vector]) -> Tuple[Vector, ...]:
    """Reduced row echelon form; zero rows dropped."""
    m = [list(r) for r in rows]
    n_cols = len(m[0]) if m else 0
    rank = 0
    for col in range(n_cols):
        pivot = next((r for r in range(rank, len(m)) if m[r][col]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = F.inv(m[rank][col])
        m[rank] = [F.mul(inv, x) for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col]:
                factor = m[r][col]
                m[r] = [F.sub(x, F.mul(factor, y)) for x, y in zip(m[r], m[rank])]
        rank += 1
    return tuple(tuple(r) for r in m[:rank])


@dataclass(frozen=True)
class LinearCode:
    """An m-dimensional code of length n, stored by its canonical RREF basis."""

    q: int
    n: int
    generator: Tuple[Vector, ...]

    @property
    def m(self) -> int:
        return len(self.generator)

    @staticmethod
    def from_rows(q: int, rows: Sequence[Vector], expect_dim: Optional[int] = None) -> "LinearCode":
        F = field(q)
        reduced = rref(F, rows)
        if expect_dim is not None and len(reduced) != expect_dim:
            raise ValueError(f"rows span dimension {len(reduced)}, expected {expect_dim}")
        n = len(rows[0]) if rows else 0
        return LinearCode(q, n, reduced)

    def column(self, j: int) -> Vector:
        return tuple(row[j - 1] for row in self.generator)

    def column_points(self) -> Tuple[int, ...]:
        """The multiset (sorted tuple) of projective point indices of the columns."""
        pts = projective_points(self.q, self.m)
        return tuple(sorted(pts.index_of(self.column(j)) for j in range(1, self.n + 1)))


def puncture(code: LinearCode, coordinate: int) -> Optional[LinearCode]:
    """Delete a coordinate; None when the dimension would drop."""
    if not 1 <= coordinate <= code.n:
        raise ValueError("coordinate out of range")
    rows = [r[: coordinate - 1] + r[coordinate:] for r in code.generator]
    F = field(code.q)
    reduced = rref(F, rows)
    if len(reduced) != code.m:
        return None
    return LinearCode(code.q, code.n - 1, reduced)


# ---------------------------------------------------------------------------
# the projective point set P and the semilinear group
# ---------------------------------------------------------------------------


class ProjectivePoints:
    """P = {0} u (F_q^m \\ 0)/scalars with the fixed indexing: index 1 is the
    zero point, the projective representatives (first nonzero entry 1)
    follow in lexicographic order."""

    def __init__(self, q: int, m: int):
        F = field(q)
        self.q, self.m = q, m
        reps = []
        for vec in product(range(q), repeat=m):
            if any(vec) and _canonical_rep(F, vec) == vec:
                reps.append(vec)
        reps.sort()
        self.reps: Tuple[Vector, ...] = ((0,) * m,) + tuple(reps)
        self._index = {rep: i + 1 for i, rep in enumerate(self.reps)}
        self.k = len(self.reps)

    def index_of(self, vec: Vector) -> int:
        F = field(self.q)
        if not any(vec):
            return 1
        return self._index[_canonical_rep(F, vec)]

    def rep(self, index: int) -> Vector:
        return self.reps[index - 1]


def _canonical_rep(F: FiniteField, vec: Vector) -> Vector:
    lead = next((x for x in vec if x), None)
    if lead is None:
        return vec
    inv = F.inv(lead)
    return tuple(F.mul(inv, x) for x in vec)


@lru_cache(maxsize=None)
def projective_points(q: int, m: int) -> ProjectivePoints:
    return ProjectivePoints(q, m)


def alphabet_size(q: int, m: int) -> int:
    return 1 + (q**m - 1) // (q - 1)


@lru_cache(maxsize=None)
def gl_elements(q: int, m: int) -> Tuple[Tuple[Vector, ...], ...]:
    """All invertible m x m matrices (tuples of rows) over F_q, m <= 2."""
    F = field(q)
    if m == 1:
        return tuple(((a,),) for a in range(1, q))
    if m == 2:
        out = []
        for a, b, c, d in product(range(q), repeat=4):
            det = F.sub(F.mul(a, d), F.mul(b, c))
            if det:
                out.append(((a, b), (c, d)))
        return tuple(out)
    raise TooLarge("explicit general linear groups are enumerated for m <= 2 only")


@lru_cache(maxsize=None)
def semilinear_point_maps(q: int, m: int) -> Tuple[Tuple[int, ...], ...]:
    """For every (matrix, automorphism) pair, its permutation of P as a value
    table over indices 1..k (index 0 unused).  Pairs repeat permutations
    (the scalar center); the multiplicity is harmless for orbit counting."""
    F = field(q)
    pts = projective_points(q, m)
    maps = []
    for phi in F.automorphisms():
        for A in gl_elements(q, m):
            table = [0] * (pts.k + 1)
            for idx in range(1, pts.k + 1):
                vec = pts.rep(idx)
                twisted = tuple(phi[x] for x in vec)
                image = tuple(
                    _dot(F, row, twisted) for row in A
                )
                table[idx] = pts.index_of(image)
            maps.append(tuple(table))
    return tuple(maps)


def _dot(F: FiniteField, row: Vector, vec: Vector) -> int:
    acc = 0
    for a, b in zip(row, vec):
        acc = F.add(acc, F.mul(a, b))
    return acc


# ---------------------------------------------------------------------------
# canonical forms and direct classification
# ---------------------------------------------------------------------------


def canonical_point_multiset(code: LinearCode) -> Tuple[int, ...]:
    """The lexicographically least image of the column point multiset under
    the semilinear group; equal iff the codes are equivalent."""
    base = code.column_points()
    best = None
    for table in semilinear_point_maps(code.q, code.m):
        image = tuple(sorted(table[i] for i in base))
        if best is None or image < best:
            best = image
    return best


def canonical_code(code: LinearCode) -> LinearCode:
    """A canonical representative of the code's equivalence class: the RREF
    basis of the columns realizing the canonical point multiset, in order."""
    pts = projective_points(code.q, code.m)
    multiset = canonical_point_multiset(code)
    columns = [pts.rep(i) for i in multiset]
    rows = tuple(
        tuple(col[i] for col in columns) for i in range(code.m)
    )
    return LinearCode.from_rows(code.q, rows, expect_dim=code.m)


def all_codes(q: int, m: int, n: int) -> Iterable[LinearCode]:
    """Every m-dimensional code of length n: all rank-m RREF matrices."""
    if m == 0:
        yield LinearCode(q, n, ())
        return
    F = field(q)

    def place(pivots: List[int], start: int):
        if len(pivots) == m:
            yield tuple(pivots)
            return
        for col in range(start, n + 1):
            yield from place(pivots + [col], col + 1)

    for pivots in place([], 1):
        # free cells: to the right of the row's pivot and not a pivot column
        free_cells = [
            (i, j)
            for i in range(m)
            for j in range(pivots[i] + 1, n + 1)
            if j not in pivots
        ]
        for values in product(range(q), repeat=len(free_cells)):
            rows = [[0] * n for _ in range(m)]
            for i, col in enumerate(pivots):
                rows[i][col - 1] = 1
            for (i, j), v in zip(free_cells, values):
                rows[i][j - 1] = v
            yield LinearCode(q, n, tuple(tuple(r) for r in rows))


DIRECT_BUDGET = dict(n=8, q=4, m=2)


def count_codes_direct(q: int, m: int, n: int, family=None) -> int:
    """Equivalence classes of m-dimensional length-n codes by canonical-form
    deduplication over all subspaces.

    ``family`` optionally restricts to a user family via a membership
    predicate on LinearCode.  It must be equivalence-invariant and closed
    under puncturing; closure is spot-checked on the counted codes (one
    allowed puncture each), not proved.
    """
    if n > DIRECT_BUDGET["n"] or q > DIRECT_BUDGET["q"] or m > DIRECT_BUDGET["m"]:
        raise TooLarge("direct classification budget is n <= 8, q <= 4, m <= 2")
    seen = {}
    for code in all_codes(q, m, n):
        if family is not None and not family(code):
            continue
        seen.setdefault(canonical_point_multiset(code), code)
    if family is not None:
        for code in seen.values():
            for coordinate in range(1, code.n + 1):
                punctured = puncture(code, coordinate)
                if punctured is not None:
                    if not family(punctured):
                        raise ValueError(
                            "family is not closed under puncturing "
                            f"(witness at coordinate {coordinate})"
                        )
                    break
    return len(seen)


# ---------------------------------------------------------------------------
# the orbit-counting route
# ---------------------------------------------------------------------------


def _subspace_point_sets(q: int, m: int) -> List[Tuple[FrozenSet[int], int]]:
    """(point set of the subspace including 0, Moebius value to the top) for
    every subspace of F_q^m, m <= 2."""
    pts = projective_points(q, m)
    full = frozenset(range(1, pts.k + 1))
    if m == 0:
        return [(frozenset({1}), 1)]
    if m == 1:
        return [(full, 1), (frozenset({1}), -1)]
    if m == 2:
        F = field(q)
        out = [(full, 1)]
        for idx in range(2, pts.k + 1):
            line_rep = pts.rep(idx)
            points = {1, idx}
            out.append((frozenset(points), -1))
        out.append((frozenset({1}), q))
        return out
    raise TooLarge("subspace lattices are enumerated for m <= 2 only")


def _fixed_multisets(table: Tuple[int, ...], points: FrozenSet[int], n: int) -> int:
    """Multisets of size n over the gamma-stable part of the point set,
    fixed by gamma: one free multiplicity per gamma-cycle, weighted by
    cycle length."""
    stable = set()
    for start in points:
        if start in stable:
            continue
        orbit = [start]
        cur = table[start]
        while cur != start:
            orbit.append(cur)
            cur = table[cur]
        if all(x in points for x in orbit):
            stable.update(orbit)
    weights = []
    seen = set()
    for start in sorted(stable):
        if start in seen:
            continue
        orbit = [start]
        seen.add(start)
        cur = table[start]
        while cur != start:
            orbit.append(cur)
            seen.add(cur)
            cur = table[cur]
        weights.append(len(orbit))
    return denumerant(weights, n)


def count_codes_burnside(q: int, m: int, n: int) -> int:
    """Equivalence classes via the orbit-counting lemma on spanning multisets.

    Averages, over the semilinear pairs, the number of fixed size-n
    multisets over P whose support spans, with the spanning condition by
    Moebius inclusion-exclusion over the subspace lattice.
    """
    maps = semilinear_point_maps(q, m)
    subspaces = _subspace_point_sets(q, m)
    total = 0
    for table in maps:
        for points, moebius in subspaces:
            total += moebius * _fixed_multisets(table, points, n)
    if total % len(maps):
        raise AssertionError("orbit-counting sum is not integral")
    return total // len(maps)


def codes_quasipolynomial(
    q: int, m: int, n_max: int, max_period: int = 6, max_degree: int = 6
) -> FittedQuasipolynomial:
    """Fit the length-counting quasipolynomial from the orbit-counting route.

    Raises quasipoly.NoFit (with the sequence attached to the message) when
    the window is too small.
    """
    seq = {n: count_codes_burnside(q, m, n) for n in range(n_max + 1)}
    from .quasipoly import NoFit

    try:
        return fit(seq, max_period=max_period, max_degree=max_degree)
    except NoFit as exc:
        raise NoFit(f"{exc} (sequence: {seq})", exc.witness) from None
