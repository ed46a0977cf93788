from fractions import Fraction
from math import comb

import pytest

from widecount.actions import TooLarge
from widecount.gallery import (
    canonical_tree,
    canonical_tree_exhaustive,
    cube_orbit_count,
    cube_orbit_count_brute,
    exact_rank,
    exact_rank_fraction,
    fixed_rank_orbit_count,
    fixed_rank_orbit_counts,
    galois_orbit_count,
    galois_orbit_count_brute,
    labeled_tree_count,
    planes_component_count,
    planes_orbit_count,
    points_component_count,
    points_orbit_count,
    prufer_to_edges,
    symmetric_binary_rank_formula,
    tree_orbit_count,
    unlabeled_tree_counts,
)
from widecount.quasipoly import NoFit, fit
import random


def test_planes():
    assert planes_component_count(4) == 6
    assert planes_orbit_count(4) == 1
    assert planes_orbit_count(2) == 1
    assert planes_orbit_count(0) == 1
    assert planes_component_count(2) == 1
    for n in range(3, 31):
        assert planes_component_count(n) == comb(n, 2)
        assert planes_orbit_count(n) == 1


def test_points():
    assert points_orbit_count(2, 3) == 4
    assert points_orbit_count(3, 2) == 6
    for n in range(10):
        assert points_orbit_count(1, n) == 1
    assert points_component_count(3, 2) == 9


def test_galois():
    assert galois_orbit_count(5) == 3
    assert galois_orbit_count(0) == 1
    assert galois_orbit_count(6) == 4
    for n in range(9):
        assert galois_orbit_count(n) == galois_orbit_count_brute(n)


def test_cube_formula_vs_brute():
    assert cube_orbit_count(3, 3) == 4
    for n in range(12):
        assert cube_orbit_count(2, n) == n // 2 + 1
        assert cube_orbit_count(1, n) == 1
    for d in range(1, 7):
        for n in range(13):
            assert cube_orbit_count(d, n) == cube_orbit_count_brute(d, n), (d, n)


def test_cube_fit_recovers_period():
    for d in range(1, 7):
        window = (d + 2) * d * 2 + 2 * d + 4
        seq = {n: cube_orbit_count(d, n) for n in range(window)}
        res = fit(seq, max_period=d, max_degree=d)
        assert d % res.qp.period == 0
        for n in range(window, window + 2 * d):
            assert res.qp.evaluate(n) == cube_orbit_count(d, n)


def test_exact_rank_agrees_with_fractions():
    rng = random.Random(42)
    for _ in range(150):
        n = rng.randint(1, 5)
        m = [
            [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(n)]
            for _ in range(n)
        ]
        assert exact_rank(m) == exact_rank_fraction(m)


def test_symmetric_binary_rank_counts():
    for n in range(1, 6):
        counts = fixed_rank_orbit_counts([Fraction(0), Fraction(1)], n, "symmetric")
        for k in (0, 1, 2):
            want = symmetric_binary_rank_formula(k, n) if k <= n else 0
            assert counts.get(k, 0) == want, (n, k)


def test_symmetric_examples():
    assert fixed_rank_orbit_count([0, 1], 2, 4, "symmetric") == 14
    assert fixed_rank_orbit_count([0, 1], 1, 5, "symmetric") == 5
    assert fixed_rank_orbit_count([0, 1], 0, 5, "symmetric") == 1


def test_rank_scale_invariance():
    a = fixed_rank_orbit_counts([Fraction(0), Fraction(1)], 4, "symmetric")
    b = fixed_rank_orbit_counts([Fraction(0), Fraction(3)], 4, "symmetric")
    assert a == b
    a = fixed_rank_orbit_counts([Fraction(0), Fraction(1)], 3, "general")
    b = fixed_rank_orbit_counts([Fraction(0), Fraction(1, 2)], 3, "general")
    assert a == b


def test_general_shape_budget():
    with pytest.raises(TooLarge):
        fixed_rank_orbit_counts([0, 1, 2, 3], 8, "general")


def test_general_shape_small():
    # 2x2 general {0,1}: 16 matrices; simultaneous swap fixes the 4 matrices
    # constant on its two cell orbits, so Burnside gives (16 + 4) / 2
    counts = fixed_rank_orbit_counts([0, 1], 2, "general")
    assert sum(counts.values()) == 10
    assert counts[0] == 1


def test_trees():
    assert tree_orbit_count(4) == (16, 2)
    assert tree_orbit_count(3) == (3, 1)
    assert tree_orbit_count(2) == (1, 1)
    assert labeled_tree_count(5) == 125
    with pytest.raises(TooLarge):
        tree_orbit_count(12)


def test_tree_counts_match_growth_oracle():
    growth = unlabeled_tree_counts(10)
    assert growth == (1, 1, 1, 2, 3, 6, 11, 23, 47, 106)
    for n in range(2, 8):
        assert tree_orbit_count(n)[1] == growth[n - 1]


def test_canonical_tree_matches_exhaustive():
    rng = random.Random(7)
    for n in range(2, 7):
        for _ in range(30):
            seq = tuple(rng.randint(1, n) for _ in range(n - 2))
            edges = prufer_to_edges(seq, n)
            seq2 = tuple(rng.randint(1, n) for _ in range(n - 2))
            edges2 = prufer_to_edges(seq2, n)
            same_code = canonical_tree(edges, n) == canonical_tree(edges2, n)
            same_exh = canonical_tree_exhaustive(edges, n) == canonical_tree_exhaustive(edges2, n)
            assert same_code == same_exh


def test_tree_sequence_has_no_quasipolynomial():
    counts = unlabeled_tree_counts(10)
    with pytest.raises(NoFit):
        fit({n: counts[n - 1] for n in range(1, 11)}, max_period=6, max_degree=6)
