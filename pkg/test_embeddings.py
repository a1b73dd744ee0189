#!/usr/bin/env python3
"""
Test script for embeddings
Rank-one embedding classes, vector searches, genus tags and L[n] inside M
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from src.embeddings import (
    GenusTag,
    compose_in_mukai,
    embed_Ln_in_mukai,
    genus_match,
    ln_index,
    orthogonal_in_mukai,
    rank1_embedding_classes,
    vectors_of_square,
)
from src.errors import AmbientMismatchError, EnumerationBoundError, SignatureObstructionError
from src.finite_forms import FiniteQuadraticForm, is_isomorphic
from src.lattice import (
    Lattice,
    PrimitiveSublattice,
    Signature,
    e8,
    hyperbolic_plane,
    k3_lattice,
    k3n_lattice,
    make_standard,
    mukai_lattice,
    orthogonal_complement,
)


def test_rank_one_into_small_targets():
    """<2> and <4> into <2> + <2> each have one class."""
    target = Lattice(((2, 0), (0, 2)))
    classes = rank1_embedding_classes(1, target)
    assert len(classes) == 1
    assert classes[0].complement_signature == Signature(1, 0)
    assert is_isomorphic(classes[0].complement_form, FiniteQuadraticForm.cyclic(2, Fraction(1, 2)))

    classes = rank1_embedding_classes(2, target)
    assert len(classes) == 1 and classes[0].subgroup_order == 2
    assert is_isomorphic(classes[0].complement_form, FiniteQuadraticForm.cyclic(4, Fraction(1, 4)))
    print("✓ <2>, <4> -> <2> + <2>")


def test_rank_one_agrees_with_vector_search():
    """Complement forms from glue agree with those of actual vectors in A2."""
    a2 = Lattice(((2, 1), (1, 2)))
    for k in (1, 2, 3):
        classes = [c.complement_form for c in rank1_embedding_classes(k, a2)]
        found = [
            orthogonal_complement(PrimitiveSublattice(a2, (v,))).lattice.discriminant_form
            for v in vectors_of_square(a2, 2 * k).vectors
        ]
        assert bool(classes) == bool(found), k
        for form in found:
            assert any(is_isomorphic(form, c) for c in classes), k
    print("✓ embedding classes match vector search in A2")


def test_signature_obstruction():
    """A positive vector cannot sit in a negative definite lattice."""
    with pytest.raises(SignatureObstructionError):
        rank1_embedding_classes(1, e8())
    with pytest.raises(SignatureObstructionError):
        GenusTag(Signature(0, 1), FiniteQuadraticForm.cyclic(2, Fraction(1, 2)))
    print("✓ signature obstructions")


def test_vectors_of_square():
    """E8 has 120 roots up to sign; indefinite searches need a box."""
    roots = vectors_of_square(e8(), -2)
    assert roots.exhaustive and len(roots.vectors) == 120
    assert vectors_of_square(e8(), 2).vectors == []

    with pytest.raises(EnumerationBoundError):
        vectors_of_square(hyperbolic_plane(), 0)
    boxed = vectors_of_square(hyperbolic_plane(), 0, bound=2)
    assert not boxed.exhaustive and sorted(boxed.vectors) == [(0, 1), (1, 0)]
    print("✓ vector search")


def test_genus_tags():
    tag = GenusTag.from_expression("U + U(2) + 2*E8 + <-4>")
    assert tag.signature == Signature(2, 19)
    assert genus_match(make_standard("U(2) + U + 2*E8 + <-4>"), tag)
    assert not genus_match(make_standard("2*U + 2*E8 + <-4>"), tag)
    print("✓ genus tags")


def test_Ln_inside_mukai():
    """L[n] sits in M with complement <2(n-1)>."""
    for n in (2, 3, 5):
        embedding = embed_Ln_in_mukai(n)
        assert mukai_lattice().square(embedding.generator) == 2 * (n - 1)
        complement = orthogonal_complement(embedding.sublattice)
        assert complement.lattice.gram == ((2 * (n - 1),),)
        assert ln_index(k3n_lattice(n)) == n
    print("✓ L[n] in M")


def test_orthogonal_in_mukai():
    L = k3n_lattice(3)
    T = PrimitiveSublattice(L, (tuple(1 if i in (0, 1) else 0 for i in range(23)),))
    assert compose_in_mukai(T).rank == 1
    assert orthogonal_in_mukai(T).rank == 23

    with pytest.raises(AmbientMismatchError):
        ln_index(k3_lattice())
    print("✓ complements in M")


def main():
    """Run all tests."""
    print("latclass Embedding Test Suite")
    print("=" * 40)
    test_rank_one_into_small_targets()
    test_rank_one_agrees_with_vector_search()
    test_signature_obstruction()
    test_vectors_of_square()
    test_genus_tags()
    test_Ln_inside_mukai()
    test_orthogonal_in_mukai()
    print("\nAll embedding tests passed!")


if __name__ == "__main__":
    main()
