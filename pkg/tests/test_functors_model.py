from math import comb, gcd

import pytest

from widecount.actions import PermGroup
from widecount.functors.elementary import ElementaryModelFunctor, elementary_count
from widecount.functors.model import (
    MFPair,
    apply_injection,
    apply_permutation,
    broken_axiom3_presentation,
    broken_symmetry_presentation,
    check_equivalence,
    elementary_embedding,
    mf_classes,
    mf_orbit_count_direct,
    roots_of_unity,
    trivial_presentation,
    verify_axioms,
)
from widecount.lattice import DownwardClosedSet


def cube_formula(d, n):
    total = 0
    for e in range(d):
        f = gcd(d, e) if e else d
        if n % (d // f) == 0:
            total += comb(n // (d // f) + f - 1, f - 1)
    assert total % d == 0
    return total // d


def test_pair_basics():
    pair = MFPair(5, (2, 4), (1, 3, 2))
    assert pair.domain == (1, 3, 5)
    assert pair.letters() == {1: 1, 3: 3, 5: 2}
    assert pair.letter_at(3) == 3 and pair.letter_at(2) is None
    assert pair.count_vector(3) == (1, 1, 1)
    with pytest.raises(ValueError):
        MFPair(3, (1, 1), (2,))


def test_apply_injection():
    pair = MFPair(4, (2,), (1, 2, 1))  # letters at 1,3,4
    # injection [3] -> [4] hitting 1,2,3
    down = apply_injection(pair, (1, 2, 3), 4)
    assert down == MFPair(3, (2,), (1, 2))
    # injection missing the sigma image
    assert apply_injection(pair, (1, 3, 4), 4) is None
    # permutation action
    moved = apply_permutation(pair, (4, 3, 2, 1))
    assert moved.sigma == (3,)
    assert moved.letters() == {1: 1, 2: 2, 4: 1}


def test_roots_classes_at_two():
    pres = roots_of_unity(2)
    classes = mf_classes(pres, 2)
    assert len(classes) == 2  # the two lines y = x and y = -x
    assert sorted(len(c) for c in classes) == [2, 2]


def test_roots_direct_counts():
    p3 = roots_of_unity(3)
    assert mf_orbit_count_direct(p3, 3) == 4
    p2 = roots_of_unity(2)
    assert mf_orbit_count_direct(p2, 4) == 3
    for d in (2, 3):
        pres = roots_of_unity(d)
        for n in range(1, 8):
            assert mf_orbit_count_direct(pres, n) == cube_formula(d, n)
        assert mf_orbit_count_direct(pres, 0) == 0  # no pairs below s0


def test_elementary_embedding_reduces():
    emf = ElementaryModelFunctor(2, PermGroup.symmetric(2), DownwardClosedSet.full(2))
    pres = elementary_embedding(emf)
    for n in range(8):
        assert mf_orbit_count_direct(pres, n) == elementary_count(emf, n)


def test_no_pairs_below_s0():
    pres = roots_of_unity(2)
    assert mf_classes(pres, 0) == []


def test_equivalence_checks():
    assert check_equivalence(roots_of_unity(2), 3) is None
    assert check_equivalence(roots_of_unity(3), 3) is None
    witness = check_equivalence(broken_symmetry_presentation(2), 3)
    assert witness is not None and witness["axiom"] == "symmetric"


def test_count_equivalents_shadow_is_exact():
    # the count-vector shadow must list exactly the count vectors of a class
    for d in (2, 3):
        pres = roots_of_unity(d)
        for n in (2, 3, 4):
            classes = mf_classes(pres, n)
            for cls in classes:
                counts = {p.count_vector(d) for p in cls}
                for p in cls:
                    assert counts == set(pres.count_equivalents(p.count_vector(d)))


def test_verify_axioms_builtins_pass():
    assert verify_axioms(roots_of_unity(2), 4).passed
    assert verify_axioms(roots_of_unity(3), 3).passed
    emf = ElementaryModelFunctor(2, PermGroup.symmetric(2), DownwardClosedSet.full(2))
    assert verify_axioms(elementary_embedding(emf), 4).passed
    assert verify_axioms(trivial_presentation(2, s0=1), 4).passed


def test_verify_axioms_negative_controls():
    report = verify_axioms(broken_symmetry_presentation(2), 3)
    assert not report.passed
    assert report.first_witness() is not None

    report = verify_axioms(broken_axiom3_presentation(), 3)
    assert not report.passed
    assert any(f["axiom"] == "axiom3" for f in report.failures) or report.failures
