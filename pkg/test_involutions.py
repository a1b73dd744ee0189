#!/usr/bin/env python3
"""
Test script for lattice involutions
Extension of reflections, discriminant actions and discriminant cases
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from src.classification import ln_vector
from src.errors import (
    AmbientMismatchError,
    ExtensionObstructionError,
    HyperbolicityError,
    NoMatchingCaseError,
)
from src.finite_forms import FiniteQuadraticForm, is_isomorphic
from src.involutions import (
    COINVARIANT,
    INVARIANT,
    classify_discriminant_case,
    extend_reflection,
    family_dimension,
    is_specialization,
    two_elementary_side,
)
from src.lattice import (
    PrimitiveSublattice,
    Signature,
    direct_sum,
    glue_overlattice,
    hyperbolic_plane,
    k3n_lattice,
    make_standard,
    orthogonal_complement,
    rank_one,
)


def _involution(n, *rows):
    L = k3n_lattice(n)
    T = PrimitiveSublattice(L, rows)
    return extend_reflection(L, orthogonal_complement(T))


def test_reflection_in_coinvariant():
    """T = <e1 + f1> in L[3] gives an involution acting by -1 on A_L."""
    t = ln_vector(e1=1, f1=1)
    involution = _involution(3, t)
    assert involution.apply(t) == t
    for s in involution.coinvariant.basis[:3]:
        assert involution.apply(s) == tuple(-x for x in s)
    assert involution.discriminant_action == -1
    assert involution.glue_exponent == 1
    assert two_elementary_side(involution) == INVARIANT
    print("✓ <2> in L[3]")


def test_reflection_with_trivial_action():
    """T = <e1 + f1, g> in L[3] acts trivially on A_L."""
    involution = _involution(3, ln_vector(e1=1, f1=1), ln_vector(g=1))
    assert involution.discriminant_action == 1
    assert two_elementary_side(involution) == COINVARIANT
    negated = involution.negated()
    assert negated.invariant == involution.coinvariant and negated.discriminant_action == -1
    print("✓ <2> + <-4> in L[3]")


def test_discriminant_cases():
    """Cases i, ii and iii on small examples."""
    z2 = FiniteQuadraticForm.cyclic(2, Fraction(1, 2))
    minus2 = FiniteQuadraticForm.cyclic(2, Fraction(-1, 2))
    z4 = FiniteQuadraticForm.cyclic(4, Fraction(1, 4))

    case = classify_discriminant_case(3, z2, make_standard("<-4> + <-2>").discriminant_form)
    assert (case.label, case.a, case.swapped) == ("i", 1, True)

    case = classify_discriminant_case(3, z4, minus2.direct_sum(minus2))
    assert (case.label, case.a, case.swapped) == ("ii", 1, False)

    case = classify_discriminant_case(2, FiniteQuadraticForm.trivial(), minus2)
    assert (case.label, case.l, case.m, case.a) == ("iii", 1, 1, 0)

    with pytest.raises(NoMatchingCaseError):
        classify_discriminant_case(3, z2, z2)
    print("✓ discriminant cases")


def test_specialization():
    L = k3n_lattice(2)
    small = PrimitiveSublattice(L, (ln_vector(e2=1),))
    large = PrimitiveSublattice(L, (ln_vector(e2=1), ln_vector(f2=1)))
    assert is_specialization(small, large)
    assert not is_specialization(large, small)
    with pytest.raises(AmbientMismatchError):
        is_specialization(small, PrimitiveSublattice(k3n_lattice(3), (ln_vector(e2=1),)))
    print("✓ specialization")


def test_family_dimension():
    L = k3n_lattice(2)
    assert family_dimension(PrimitiveSublattice(L, (ln_vector(e1=1), ln_vector(f1=1)))) == 19
    assert family_dimension(PrimitiveSublattice(L, (ln_vector(e1=1, f1=1),))) == 20
    with pytest.raises(HyperbolicityError):
        family_dimension(PrimitiveSublattice(L, (ln_vector(g=1),)))
    print("✓ family dimension")


def test_glued_toy_lattice():
    """<4> and <-2> + <-2> glued along (2, 1, 1): det 4, q = -1/4, reflection extends with action +1."""
    glued = glue_overlattice(rank_one(4), direct_sum(rank_one(-2), rank_one(-2)), [(2, 1, 1)])
    lattice = glued.lattice
    assert glued.index == 2
    assert lattice.determinant == 4
    assert lattice.signature == Signature(1, 2)
    assert is_isomorphic(lattice.discriminant_form, FiniteQuadraticForm.cyclic(4, Fraction(-1, 4)))

    involution = extend_reflection(lattice, glued.coinvariant)
    assert involution.discriminant_action == 1
    assert involution.glue_exponent == 1
    assert involution.invariant.contains_sublattice(glued.invariant)
    assert glued.invariant.contains_sublattice(involution.invariant)
    for row in glued.coinvariant.basis:
        assert involution.apply(row) == tuple(-x for x in row)
    print("✓ glued toy lattice")


def test_reflection_without_extension():
    """-1 on <e + 2f> in U does not extend: [U : T + S] = 4 and f maps to -e/2."""
    U = hyperbolic_plane()
    with pytest.raises(ExtensionObstructionError):
        extend_reflection(U, PrimitiveSublattice(U, ((1, 2),)))
    assert extend_reflection(U, PrimitiveSublattice(U, ((1, 1),))).glue_exponent == 1
    print("✓ obstructed extension")


def main():
    """Run all tests."""
    print("latclass Involution Test Suite")
    print("=" * 40)
    test_reflection_in_coinvariant()
    test_reflection_with_trivial_action()
    test_discriminant_cases()
    test_specialization()
    test_family_dimension()
    test_glued_toy_lattice()
    test_reflection_without_extension()
    print("\nAll involution tests passed!")


if __name__ == "__main__":
    main()
