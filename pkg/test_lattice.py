#!/usr/bin/env python3
"""
Test script for the lattice core
Standard families, discriminant forms, sublattices and overlattices
"""

import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from src.errors import (
    DegenerateLatticeError,
    DependentRowsError,
    GlueError,
    NotSaturatedError,
    OddLatticeError,
    UnknownFamilyError,
    ZeroVectorError,
)
from src.expression_parser import build_lattice, random_expressions
from src.finite_forms import FiniteQuadraticForm, is_isomorphic
from src.integer_matrix import (
    congruent_gram,
    determinant,
    inverse_product,
    mat_mul,
    reduce_mod2,
    smith_decomposition,
)
from src.lattice import (
    Lattice,
    PrimitiveSublattice,
    Signature,
    Sublattice,
    direct_sum,
    discriminant_group,
    divisibility,
    e8,
    glue_overlattice,
    hyperbolic_plane,
    k3_lattice,
    k3n_lattice,
    make_standard,
    mukai_lattice,
    orthogonal_complement,
    overlattice_from_glue,
    rank_one,
    saturation,
    signature,
)


def test_standard_families():
    """U, E8 and the K3 lattices have the expected invariants."""
    print("Testing standard families")
    print("=" * 40)

    u = hyperbolic_plane()
    assert u.determinant == -1 and u.signature == Signature(1, 1)
    assert hyperbolic_plane(2).determinant == -4
    assert hyperbolic_plane().rescaled(2) == hyperbolic_plane(2)
    assert str(hyperbolic_plane().rescaled(2)) == "U(2)"
    assert e8().determinant == 1 and e8().signature == Signature(0, 8)
    print("✓ U, U(2) and E8")

    k3 = k3_lattice()
    assert k3.rank == 22 and k3.signature == Signature(3, 19) and k3.is_unimodular()
    mukai = mukai_lattice()
    assert mukai.rank == 24 and mukai.signature == Signature(4, 20) and mukai.determinant == 1
    print("✓ K3 and Mukai lattices")

    L3 = k3n_lattice(3)
    assert L3.rank == 23 and L3.determinant == 4 and L3.signature == Signature(3, 20)
    print("✓ L[3] has rank 23 and determinant 4")


def test_discriminant_of_Ln():
    """A_L for L[n] is Z/2(n-1) with q = -1/2(n-1)."""
    for n in range(2, 11):
        twice = 2 * (n - 1)
        form = k3n_lattice(n).discriminant_form
        assert form.invariant_factors == (twice,)
        assert is_isomorphic(form, FiniteQuadraticForm.cyclic(twice, Fraction(-1, twice)))
    print("✓ discriminant forms of L[2] .. L[10]")


def test_discriminant_presentation():
    """Lifting an element of A_L and reading it back is the identity."""
    presentation = k3n_lattice(3).discriminant
    for x in range(4):
        assert presentation.class_of(presentation.lift((x,))) == (x,)
    with pytest.raises(GlueError):
        presentation.class_of((Fraction(1, 3),) + (0,) * 22)
    print("✓ lifts to the dual lattice")


def test_discriminant_of_scaled_plane():
    """U(2) has discriminant (Z/2)^2 with q = 0 and b = 1/2."""
    form = make_standard("U(2)").discriminant_form
    assert form.invariant_factors == (2, 2)
    assert sorted(form.value_multiset()) == [0, 0, 0, 1]
    print("✓ A_U(2)")


def test_invalid_gram_matrices():
    """Odd, singular and asymmetric Gram matrices are rejected."""
    with pytest.raises(OddLatticeError):
        Lattice(((1,),))
    with pytest.raises(DegenerateLatticeError):
        Lattice(((0, 0), (0, 0)))
    with pytest.raises(DegenerateLatticeError):
        Lattice(((0, 1), (2, 0)))
    with pytest.raises(OddLatticeError):
        rank_one(3)
    with pytest.raises(UnknownFamilyError):
        k3n_lattice(1)
    print("✓ invalid lattices raise")


def test_sublattices():
    """Saturation, primitivity and complements."""
    plane = direct_sum(hyperbolic_plane(), hyperbolic_plane())
    with pytest.raises(DependentRowsError):
        Sublattice(plane, ((1, 0, 0, 0), (2, 0, 0, 0)))
    with pytest.raises(NotSaturatedError):
        PrimitiveSublattice(plane, ((2, 2, 0, 0),))

    saturated = saturation([(2, 2, 0, 0)], plane)
    assert saturated.rank == 1 and saturated.contains((1, 1, 0, 0))

    complement = orthogonal_complement(PrimitiveSublattice(plane, ((1, 1, 0, 0),)))
    assert complement.rank == 3
    assert complement.contains((1, -1, 0, 0)) and complement.contains((0, 0, 1, 0))
    assert not complement.contains((1, 0, 0, 0))
    print("✓ saturation and orthogonal complement")


def test_divisibility():
    """Divisibility of e1 and g in L[n]."""
    L = k3n_lattice(4)
    g = L.basis_vector(22)
    assert divisibility(L.basis_vector(0), L) == 1
    assert divisibility(g, L) == 6
    with pytest.raises(ZeroVectorError):
        divisibility((0,) * 23, L)
    print("✓ divisibility")


def test_glue_overlattice():
    """<2> + <-2> glued along (1, 1) is an even unimodular plane."""
    glued = glue_overlattice(rank_one(2), rank_one(-2), [(1, 1)])
    assert glued.index == 2
    assert glued.lattice.is_unimodular()
    assert glued.lattice.signature == Signature(1, 1)

    with pytest.raises(GlueError):
        glue_overlattice(rank_one(2), rank_one(2), [(1, 1)])
    plane = overlattice_from_glue(rank_one(2), rank_one(-2), [(1, 1)])
    assert plane.determinant == -1 and signature(plane) == Signature(1, 1)
    assert discriminant_group(plane).is_trivial()
    assert discriminant_group(rank_one(4)).invariant_factors == (4,)
    print("✓ overlattice from glue")


def test_complement_is_involutive():
    """(S-perp)-perp = S for primitive S in the unimodular 3U."""
    ambient = direct_sum(hyperbolic_plane(), hyperbolic_plane(), hyperbolic_plane())
    rng = np.random.default_rng(5)
    checked = 0
    for _ in range(40):
        rows = rng.integers(-3, 4, size=(int(rng.integers(1, 4)), ambient.rank))
        try:
            S = saturation(rows.tolist(), ambient)
        except DependentRowsError:
            continue
        complement = orthogonal_complement(S)
        assert complement.rank == ambient.rank - S.rank
        back = orthogonal_complement(complement)
        assert back.contains_sublattice(S) and S.contains_sublattice(back)
        checked += 1
    assert checked >= 30
    print(f"✓ complement involutive on {checked} sublattices")


def test_signature_is_additive():
    rng = np.random.default_rng(9)
    built = [build_lattice(e) for e in random_expressions(rng, 40, kinds=("U", "<>"), max_terms=3)]
    built.append(e8(-1))
    for a, b in zip(built, built[1:]):
        total = signature(direct_sum(a, b))
        assert total.positive == a.signature.positive + b.signature.positive
        assert total.negative == a.signature.negative + b.signature.negative
    print("✓ signature additive over direct sums")


def test_smith_round_trip():
    """s * A * t is the Smith diagonal, with s and t unimodular."""
    rng = np.random.default_rng(17)
    for _ in range(60):
        r, c = (int(x) for x in rng.integers(1, 5, size=2))
        A = [tuple(int(x) for x in row) for row in rng.integers(-5, 6, size=(r, c))]
        diagonal, s, t = smith_decomposition(A)
        expected = [tuple(diagonal[i] if i == j else 0 for j in range(c)) for i in range(r)]
        assert mat_mul(mat_mul(s, A), t) == expected
        assert abs(determinant(s)) == 1 and abs(determinant(t)) == 1
        nonzero = [d for d in diagonal if d]
        assert all(d > 0 for d in nonzero)
        assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
    print("✓ Smith normal form round trip")


def test_matrix_helpers():
    """Exact dual products behind the discriminant presentation."""
    assert congruent_gram([(Fraction(1, 2), 0)], ((2, 1), (1, 2))) == [(Fraction(1, 2),)]
    assert congruent_gram([], ((2,),)) == []
    assert inverse_product(((1, 0), (0, 1)), ((2, 0), (0, 4))) == [(Fraction(1, 2), 0), (0, Fraction(1, 4))]
    assert reduce_mod2((1, 0, 1), [(0, 1, 1), (1, 1, 0)]) == (0, 0, 0)
    assert reduce_mod2((3, 2, 0), []) == (1, 0, 0)
    # the dual Gram of E8(2) is E8 / 2
    form = e8(2).discriminant_form
    assert form.size == 2 ** 8 and form.invariant_factors == (2,) * 8
    print("✓ matrix helpers")


def main():
    """Run all tests."""
    print("latclass Lattice Test Suite")
    print("=" * 40)
    test_standard_families()
    test_discriminant_of_Ln()
    test_discriminant_presentation()
    test_discriminant_of_scaled_plane()
    test_invalid_gram_matrices()
    test_sublattices()
    test_divisibility()
    test_glue_overlattice()
    test_complement_is_involutive()
    test_signature_is_additive()
    test_smith_round_trip()
    test_matrix_helpers()
    print("\nAll lattice tests passed!")


if __name__ == "__main__":
    main()
