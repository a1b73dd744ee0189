#!/usr/bin/env python3
"""
Test script for the classification drivers
Rank-one and rank-two families, verification and maximal families
"""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from src.classification import (
    CITED_UNIQUENESS,
    UNVERIFIED,
    classify_rank1,
    classify_rank2,
    find_family,
    maximal_families,
    rank1_fingerprint,
    two_square_representations,
)
from src.embeddings import genus_match
from src.errors import UnknownFamilyError


def test_two_square_representations():
    assert two_square_representations(1) == [(1, 0)]
    assert two_square_representations(2) == [(1, 1)]
    assert two_square_representations(5) == [(2, 1)]
    assert two_square_representations(9) == []
    assert two_square_representations(25) == [(4, 3)]
    print("✓ coprime sums of two squares")


def test_rank_one_existence():
    """t2n exists for n = 2, 3, 6 and t2-div2 for n = 4, 8 within 2..10."""
    t2n, div2 = set(), set()
    for n in range(2, 11):
        rows = {r.family_id: r for r in classify_rank1(n)}
        assert set(rows) == {"t2-div1", "t2-div2", "t2n"}
        assert rows["t2-div1"].exists
        if rows["t2n"].exists:
            t2n.add(n)
        if rows["t2-div2"].exists:
            div2.add(n)
    assert t2n == {2, 3, 6}
    assert div2 == {4, 8}
    print("✓ rank-one existence")


def test_rank_one_verified():
    """Every existing rank-one row is verified, including the genus of S."""
    for n in range(2, 7):
        for record in classify_rank1(n):
            if record.exists:
                assert record.verified, (n, record.family_id, record.problems)
    record = find_family(3, "t2n")
    assert record.invariant.lattice.gram == ((4,),)
    assert genus_match(record.involution.coinvariant.lattice, record.s_genus)
    print("✓ rank-one verification")


RANK2_CASES = [
    (2, -1, {"hyperbolic", "u2", "a1a1", "a1a1-cyclic"}),
    (3, -1, {"hyperbolic", "u2", "a1a1", "u2-glued"}),
    (4, -1, {"hyperbolic", "u2", "a1a1", "a1a1-cyclic"}),
    (5, -1, {"hyperbolic", "u2", "a1a1", "u2-glued", "a1a1-odd"}),
    (2, 1, {"split", "split-u2", "hyperbolic-plus", "u2-plus"}),
    (3, 1, {"split", "split-u2"}),
    (5, 1, {"split", "split-u2"}),
]


@pytest.mark.parametrize("n, action, expected", RANK2_CASES)
def test_rank_two_rows(n, action, expected):
    """Rank-two lists for small n, every row verified."""
    records = classify_rank2(n, action)
    assert {r.family_id for r in records} == expected
    for record in records:
        assert record.verified, (record.family_id, record.problems)
        assert record.uniqueness_note == CITED_UNIQUENESS
        assert record.dimension == 19
    print(f"✓ rank two, n = {n}, action {action:+d}")


def test_rows_without_representative():
    """For n = 6 the cyclic <2> + <-2> row exists only at genus level."""
    record = next(r for r in classify_rank2(6, -1) if r.family_id == "a1a1-cyclic")
    assert record.exists and not record.verified
    assert record.uniqueness_note == UNVERIFIED
    assert record.invariant is None
    print("✓ genus-level row at n = 6")


def test_notes_outside_verified_range():
    """Past n = 5 every row carries the unverified-representative note."""
    records = [r for r in classify_rank1(6) + classify_rank2(6, -1) if r.exists]
    assert records
    for record in records:
        assert record.uniqueness_note.startswith(UNVERIFIED), record.family_id
    print("✓ notes for n = 6")


def test_invalid_requests():
    with pytest.raises(UnknownFamilyError):
        classify_rank2(3, 0)
    with pytest.raises(UnknownFamilyError):
        classify_rank1(1)
    with pytest.raises(UnknownFamilyError):
        find_family(3, "a1a1-odd")
    print("✓ invalid requests")


def test_fingerprints():
    assert rank1_fingerprint(4, 2, 1) == "t2-div1"
    assert rank1_fingerprint(4, 2, 2) == "t2-div2"
    assert rank1_fingerprint(5, 2, 2) is None
    assert rank1_fingerprint(3, 4, 2) == "t2n"
    assert rank1_fingerprint(5, 8, 4) is None
    print("✓ rank-one fingerprints")


def test_maximal_families():
    """Maximal families and their component counts for n = 2..5."""
    expected = {
        2: {"t2-div1": 1, "u2": 1},
        3: {"t2-div1": 1, "t2n": 1, "u2": 1},
        4: {"t2-div1": 1, "t2-div2": 1, "u2": 1},
        5: {"t2-div1": 1, "u2": 1, "u2-glued": 3},
    }
    for n, wanted in expected.items():
        families = maximal_families(n)
        assert {f.record.family_id: f.components for f in families} == wanted
        for family in families:
            assert family.dimension == 21 - family.record.rank
    print("✓ maximal families")


def main():
    """Run all tests."""
    print("latclass Classification Test Suite")
    print("=" * 40)
    test_two_square_representations()
    test_rank_one_existence()
    test_rank_one_verified()
    for case in RANK2_CASES:
        test_rank_two_rows(*case)
    test_rows_without_representative()
    test_notes_outside_verified_range()
    test_invalid_requests()
    test_fingerprints()
    test_maximal_families()
    print("\nAll classification tests passed!")


if __name__ == "__main__":
    main()
