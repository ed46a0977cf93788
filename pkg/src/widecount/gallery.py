"""Executable versions of the worked examples: closed-form counts, brute-force
component enumerators, and the fixed-rank and tree applications.

Rank computations are exact: matrices are scaled to integers and ranked
modulo a prime exceeding the Hadamard bound on their minors, which provably
agrees with the rank over the rationals.
"""
from __future__ import annotations

import heapq
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb, factorial, gcd, isqrt
from typing import Dict, Iterable, List, Sequence, Tuple

from .actions import PermGroup, TooLarge
from .functors.elementary import ElementaryModelFunctor, elementary_brute
from .lattice import DownwardClosedSet

TREE_BRUTE_LIMIT = 9
RANK_CELL_BUDGET = 10**8


# ---------------------------------------------------------------------------
# coordinate planes / points / two-valued coordinates / cyclic cube
# ---------------------------------------------------------------------------


def planes_component_count(n: int) -> int:
    """Components of the no-three-distinct-coordinates family: coordinate
    planes for n >= 3; below that nothing is cut out and the whole space is
    the single component."""
    return comb(n, 2) if n >= 3 else 1


def planes_orbit_count(n: int) -> int:
    """The coordinate planes form a single symmetric-group orbit."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return 1


def points_component_count(d: int, n: int) -> int:
    if d < 1:
        raise ValueError("d must be positive")
    return d**n


def points_orbit_count(d: int, n: int) -> int:
    """Tuples of d-th roots of unity up to coordinate permutation."""
    if d < 1:
        raise ValueError("d must be positive")
    return comb(n + d - 1, d - 1)


def galois_orbit_count(n: int) -> int:
    """Unordered two-block partitions of [n] up to permutation."""
    return n // 2 + 1


def galois_orbit_count_brute(n: int) -> int:
    """Oracle: enumerate two-letter words modulo positions and letter swap."""
    emf = ElementaryModelFunctor(2, PermGroup.symmetric(2), DownwardClosedSet.full(2))
    return elementary_brute(emf, n)


def cube_orbit_count(d: int, n: int) -> int:
    """The cyclic-difference family: orbits of compositions of n into d parts
    under rotation, by the gcd-weighted binomial sum."""
    if d < 1:
        raise ValueError("d must be positive")
    total = 0
    for e in range(d):
        f = gcd(d, e) if e else d
        if n % (d // f) == 0:
            total += comb(n // (d // f) + f - 1, f - 1)
    if total % d:
        raise AssertionError("rotation count is not integral")
    return total // d


def _compositions(n: int, d: int) -> Iterable[Tuple[int, ...]]:
    if d == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, d - 1):
            yield (first,) + rest


def cube_orbit_count_brute(d: int, n: int) -> int:
    """Oracle: canonical rotation representatives of compositions."""
    seen = set()
    for c in _compositions(n, d):
        seen.add(min(c[i:] + c[:i] for i in range(d)))
    return len(seen)


def cube_component_count(d: int, n: int) -> int:
    """Number of components: rotation orbits are orbits of size dividing d on
    ordered partitions of [n]; componentwise this is d^(n-1) for n >= 1."""
    return d ** (n - 1) if n >= 1 else 1


# ---------------------------------------------------------------------------
# exact rank over the rationals
# ---------------------------------------------------------------------------


def _next_prime(m: int) -> int:
    candidate = max(m + 1, 2)
    while True:
        if candidate % 2 == 0 and candidate > 2:
            candidate += 1
            continue
        is_prime = candidate >= 2
        for p in range(3, isqrt(candidate) + 1, 2):
            if candidate % p == 0:
                is_prime = False
                break
        if candidate == 2 or (is_prime and candidate % 2):
            return candidate
        candidate += 1


def _integerize(entries: Sequence[Fraction]) -> Tuple[List[int], int]:
    denom = 1
    fracs = [Fraction(e) for e in entries]
    for e in fracs:
        denom = denom * e.denominator // gcd(denom, e.denominator)
    return [int(e * denom) for e in fracs], denom


def rank_prime_for(n: int, max_abs: int) -> int:
    """A prime above the Hadamard bound: every nonzero minor of an n x n
    integer matrix with entries bounded by max_abs stays nonzero mod p."""
    bound = 1
    row_norm_sq = n * max_abs * max_abs
    for _ in range(n):
        bound *= isqrt(row_norm_sq) + 1
    return _next_prime(bound)


def exact_rank(matrix: Sequence[Sequence[Fraction]]) -> int:
    """Rank over the rationals by elimination mod a provably safe prime."""
    rows = len(matrix)
    if rows == 0:
        return 0
    cols = len(matrix[0])
    flat, _ = _integerize([x for row in matrix for x in row])
    max_abs = max((abs(x) for x in flat), default=0)
    p = rank_prime_for(max(rows, cols), max(max_abs, 1))
    m = [[flat[i * cols + j] % p for j in range(cols)] for i in range(rows)]
    rank = 0
    for col in range(cols):
        pivot = None
        for r in range(rank, rows):
            if m[r][col]:
                pivot = r
                break
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = pow(m[rank][col], p - 2, p)
        prow = m[rank]
        for r in range(rank + 1, rows):
            factor = m[r][col]
            if factor:
                mult = factor * inv % p
                row = m[r]
                for j in range(col, cols):
                    row[j] = (row[j] - mult * prow[j]) % p
        rank += 1
        if rank == rows:
            break
    return rank


def exact_rank_fraction(matrix: Sequence[Sequence[Fraction]]) -> int:
    """Reference rank by exact rational elimination (oracle for exact_rank)."""
    m = [[Fraction(x) for x in row] for row in matrix]
    rows, cols = len(m), len(m[0]) if m else 0
    rank = 0
    for col in range(cols):
        pivot = next((r for r in range(rank, rows) if m[r][col]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for r in range(rank + 1, rows):
            if m[r][col]:
                factor = m[r][col] / m[rank][col]
                m[r] = [a - factor * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# fixed-rank matrices with entries in a finite set, up to simultaneous
# row/column permutation
# ---------------------------------------------------------------------------


def _cycle_type_representatives(n: int) -> List[Tuple[Tuple[int, ...], int]]:
    """(canonical permutation of each cycle type, number of permutations of
    that type) for Sym(n)."""

    def partitions(m: int, largest: int) -> Iterable[Tuple[int, ...]]:
        if m == 0:
            yield ()
            return
        for part in range(min(m, largest), 0, -1):
            for rest in partitions(m - part, part):
                yield (part,) + rest

    out = []
    for ptn in partitions(n, n):
        images = []
        start = 1
        for length in ptn:
            block = list(range(start + 1, start + length)) + [start]
            images.extend(block)
            start += length
        size = factorial(n)
        mult: Dict[int, int] = {}
        for length in ptn:
            mult[length] = mult.get(length, 0) + 1
        for length, count in mult.items():
            size //= (length**count) * factorial(count)
        out.append((tuple(images), size))
    return out


def _cell_orbits(images: Tuple[int, ...], symmetric: bool) -> List[List[Tuple[int, int]]]:
    n = len(images)
    if symmetric:
        cells = [(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]
    else:
        cells = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]

    def act(cell):
        i, j = images[cell[0] - 1], images[cell[1] - 1]
        return (min(i, j), max(i, j)) if symmetric else (i, j)

    seen = set()
    orbits = []
    for cell in cells:
        if cell in seen:
            continue
        orbit = []
        cur = cell
        while cur not in seen:
            seen.add(cur)
            orbit.append(cur)
            cur = act(cur)
        orbits.append(orbit)
    return orbits


def fixed_rank_orbit_counts(
    entries: Sequence[Fraction], n: int, shape: str = "symmetric"
) -> Dict[int, int]:
    """Orbit counts, per rank, of n x n matrices with entries in the given
    set under simultaneous row/column permutation.

    Burnside over the cycle types of Sym(n): a permutation's fixed matrices
    are constant on its cell orbits, and each is ranked exactly.
    """
    if shape not in ("symmetric", "general"):
        raise ValueError("shape must be 'symmetric' or 'general'")
    symmetric = shape == "symmetric"
    cells = n * (n + 1) // 2 if symmetric else n * n
    if len(entries) ** cells > RANK_CELL_BUDGET:
        raise TooLarge("entry assignments exceed the rank enumeration budget")
    entry_list = [Fraction(e) for e in entries]
    ints, _ = _integerize(entry_list)
    max_abs = max((abs(x) for x in ints), default=0)
    p = rank_prime_for(n, max(max_abs, 1))
    entry_residues = [x % p for x in ints]

    totals: Dict[int, int] = {}
    for images, class_size in _cycle_type_representatives(n):
        orbits = _cell_orbits(images, symmetric)
        for assignment in product(range(len(entry_list)), repeat=len(orbits)):
            m = [[0] * n for _ in range(n)]
            for orbit, choice in zip(orbits, assignment):
                value = entry_residues[choice]
                for i, j in orbit:
                    m[i - 1][j - 1] = value
                    if symmetric:
                        m[j - 1][i - 1] = value
            r = _rank_mod(m, p)
            totals[r] = totals.get(r, 0) + class_size
    order = factorial(n)
    out = {}
    for r, total in totals.items():
        if total % order:
            raise AssertionError("Burnside sum is not integral")
        out[r] = total // order
    return out


def _rank_mod(m: List[List[int]], p: int) -> int:
    n = len(m)
    work = [row[:] for row in m]
    rank = 0
    for col in range(n):
        pivot = next((r for r in range(rank, n) if work[r][col]), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        inv = pow(work[rank][col], p - 2, p)
        prow = work[rank]
        for r in range(rank + 1, n):
            factor = work[r][col]
            if factor:
                mult = factor * inv % p
                row = work[r]
                for j in range(col, n):
                    row[j] = (row[j] - mult * prow[j]) % p
        rank += 1
        if rank == n:
            break
    return rank


def fixed_rank_orbit_count(
    entries: Sequence[Fraction], k: int, n: int, shape: str = "symmetric"
) -> int:
    """Orbits of rank-k matrices with entries in the given set."""
    return fixed_rank_orbit_counts(entries, n, shape).get(k, 0)


def symmetric_binary_rank_formula(k: int, n: int) -> int:
    """Closed forms for symmetric {0,1} matrices of rank 0, 1, 2."""
    if k == 0:
        return 1
    if k == 1:
        return n
    if k == 2:
        return 2 * (n // 2) * ((n + 1) // 2) + comb(n, 2)
    raise ValueError("closed forms are available for k <= 2 only")


# ---------------------------------------------------------------------------
# labeled trees and their symmetric-group orbits
# ---------------------------------------------------------------------------


def labeled_tree_count(n: int) -> int:
    """Cayley: n^(n-2) spanning trees of the complete graph for n >= 2."""
    if n < 1:
        raise ValueError("n must be positive")
    return 1 if n <= 2 else n ** (n - 2)


def prufer_to_edges(seq: Sequence[int], n: int) -> Tuple[Tuple[int, int], ...]:
    """Decode a Pruefer sequence over [n] into the edges of a labeled tree."""
    degree = [1] * (n + 1)
    for v in seq:
        degree[v] += 1
    edges = []
    leaves = [v for v in range(1, n + 1) if degree[v] == 1]
    heapq.heapify(leaves)
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, v), max(leaf, v)))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((min(u, v), max(u, v)))
    return tuple(sorted(edges))


def canonical_tree(edges: Sequence[Tuple[int, int]], n: int) -> str:
    """Canonical form of a labeled tree: the rooted encoding at the centroid
    (classic bottom-up relabeling), equal iff the trees are isomorphic."""
    if n == 1:
        return "()"
    adjacency: Dict[int, List[int]] = {v: [] for v in range(1, n + 1)}
    for a, b in edges:
        adjacency[a].append(b)
        adjacency[b].append(a)
    # find the 1- or 2-vertex center by peeling leaves
    degree = {v: len(adjacency[v]) for v in adjacency}
    layer = [v for v in adjacency if degree[v] <= 1]
    removed = set()
    remaining = n
    while remaining > 2:
        nxt = []
        for v in layer:
            removed.add(v)
            remaining -= 1
            for w in adjacency[v]:
                if w not in removed:
                    degree[w] -= 1
                    if degree[w] == 1:
                        nxt.append(w)
        layer = nxt
    centers = [v for v in adjacency if v not in removed]

    def encode(root: int, parent: int) -> str:
        children = sorted(
            encode(w, root) for w in adjacency[root] if w != parent
        )
        return "(" + "".join(children) + ")"

    return min(encode(c, 0) for c in centers)


def canonical_tree_exhaustive(edges: Sequence[Tuple[int, int]], n: int) -> Tuple[Tuple[int, int], ...]:
    """Minimum relabeled edge list over all of Sym(n); tiny n only."""
    from itertools import permutations

    if n > 8:
        raise TooLarge("exhaustive tree canonicalization limited to n <= 8")
    best = None
    for images in permutations(range(1, n + 1)):
        relabeled = tuple(
            sorted(
                (min(images[a - 1], images[b - 1]), max(images[a - 1], images[b - 1]))
                for a, b in edges
            )
        )
        if best is None or relabeled < best:
            best = relabeled
    return best


def tree_orbit_count(n: int) -> Tuple[int, int]:
    """(labeled tree count, Sym(n)-orbit count) by Pruefer enumeration plus
    canonicalization; the orbit count equals the unlabeled tree count."""
    if n > TREE_BRUTE_LIMIT:
        raise TooLarge(f"tree enumeration limited to n <= {TREE_BRUTE_LIMIT}")
    if n <= 2:
        return (1, 1)
    labeled = 0
    seen = set()
    for seq in product(range(1, n + 1), repeat=n - 2):
        edges = prufer_to_edges(seq, n)
        labeled += 1
        seen.add(canonical_tree(edges, n))
    assert labeled == labeled_tree_count(n)
    return labeled, len(seen)


@lru_cache(maxsize=None)
def unlabeled_tree_counts(n_max: int) -> Tuple[int, ...]:
    """Unlabeled tree counts for 1..n_max by canonical leaf-growth, the
    independent oracle for the orbit counts."""
    counts = []
    current: Dict[str, Tuple[Tuple[int, int], ...]] = {"()": ()}
    counts.append(1)  # n = 1
    size = 1
    while size < n_max:
        nxt: Dict[str, Tuple[Tuple[int, int], ...]] = {}
        for edges in current.values():
            for attach in range(1, size + 1):
                new_edges = tuple(sorted(edges + ((attach, size + 1),)))
                code = canonical_tree(new_edges, size + 1)
                if code not in nxt:
                    nxt[code] = new_edges
        current = nxt
        size += 1
        counts.append(len(current))
    return tuple(counts[:n_max])


# ---------------------------------------------------------------------------
# example registry (CLI-facing)
# ---------------------------------------------------------------------------

EXAMPLES = ("planes", "points", "galois", "cube", "trees")


def example_counts(name: str, n: int, d: int = 3) -> Dict[str, int]:
    """Counts for one example at one n: closed form, components where
    defined, and the brute-force oracle where affordable."""
    if name == "planes":
        return {
            "orbits": planes_orbit_count(n),
            "components": planes_component_count(n),
        }
    if name == "points":
        return {
            "orbits": points_orbit_count(d, n),
            "components": points_component_count(d, n),
        }
    if name == "galois":
        out = {"orbits": galois_orbit_count(n)}
        if 2**n <= 10**6:
            out["brute"] = galois_orbit_count_brute(n)
        return out
    if name == "cube":
        out = {"orbits": cube_orbit_count(d, n)}
        if comb(n + d - 1, d - 1) <= 10**6:
            out["brute"] = cube_orbit_count_brute(d, n)
        return out
    if name == "trees":
        out = {"labeled": labeled_tree_count(n)}
        if n <= 8:
            out["orbits"] = tree_orbit_count(n)[1]
        else:
            out["orbits"] = unlabeled_tree_counts(n)[n - 1]
        return out
    raise ValueError(f"unknown example {name!r}; choose from {EXAMPLES}")
