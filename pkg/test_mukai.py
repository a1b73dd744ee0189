#!/usr/bin/env python3
"""
Test script for twisted Mukai vectors
Pairings, B-field twists, Brauer kernels and moduli invariants
"""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from src.embeddings import GenusTag, genus_match
from src.errors import AmbientMismatchError, IntegralityError, MukaiVectorError
from src.lattice import PrimitiveSublattice, Signature, k3_lattice, k3n_lattice
from src.mukai import (
    K3_RANK,
    BField,
    MukaiVector,
    TwistedSurfaceData,
    ample_multiple,
    brauer_kernel,
    double_plane_example,
    is_positive,
    moduli_invariants,
    mukai_pairing,
    mukai_triple_lattice,
    polarized_example,
    twist,
)

ZERO = (0,) * K3_RANK


def k3_row(**coefficients):
    positions = {"e1": 0, "f1": 1, "e2": 2, "f2": 3, "e3": 4, "f3": 5}
    row = [0] * K3_RANK
    for name, value in coefficients.items():
        row[positions[name]] = value
    return tuple(row)


def test_pairing():
    """(r, H, s).(r', H', s') = H.H' - r s' - r' s."""
    point = MukaiVector(1, ZERO, 1)
    assert point.square() == -2
    h = k3_row(e1=1, f1=1)
    assert mukai_pairing(MukaiVector(0, ZERO, 1), MukaiVector(2, h, 0)) == -2
    assert MukaiVector(0, h, 0).square() == 2
    assert MukaiVector.from_row(MukaiVector(2, h, -1).as_row()) == MukaiVector(2, h, -1)
    with pytest.raises(AmbientMismatchError):
        MukaiVector(0, (1, 0), 0)
    print("✓ Mukai pairing")


def test_triple_lattice():
    lattice = mukai_triple_lattice()
    assert lattice.rank == 24
    assert lattice.signature == Signature(4, 20)
    assert lattice.is_unimodular()
    print("✓ triple lattice is unimodular of signature (4,20)")


def test_twist():
    """Twisting preserves the square and fails on half-integral results."""
    h = k3_row(e1=1, f1=1)
    b_field = BField(k3_row(f1=1))
    v = MukaiVector(0, tuple(2 * x for x in h), 0)
    twisted = twist(v, b_field)
    assert twisted == MukaiVector(0, tuple(2 * x for x in h), 1)
    assert twisted.square() == v.square() == 8

    with pytest.raises(IntegralityError):
        twist(MukaiVector(1, ZERO, 0), b_field)
    with pytest.raises(IntegralityError):
        BField.from_rational([0.25] + [0] * (K3_RANK - 1))
    assert BField.from_rational(["1/2"] + [0] * (K3_RANK - 1)).twice == k3_row(e1=1)
    print("✓ B-field twist")


def test_positivity():
    h = k3_row(e3=1, f3=1)
    effective = ample_multiple(h)
    assert is_positive(MukaiVector(1, ZERO, -5), effective)
    assert not is_positive(MukaiVector(-1, h, 0), effective)
    assert is_positive(MukaiVector(0, tuple(2 * x for x in h), -3), effective)
    assert not is_positive(MukaiVector(0, tuple(-x for x in h), 0), effective)
    assert is_positive(MukaiVector(0, ZERO, 1), effective)
    assert not is_positive(MukaiVector(0, ZERO, -1), effective)
    print("✓ positivity")


def test_invalid_vectors():
    """Non-primitive vectors and squares below 2 are rejected."""
    example = double_plane_example()
    with pytest.raises(MukaiVectorError):
        moduli_invariants(example.data, MukaiVector(0, tuple(2 * x for x in k3_row(e1=1, f1=1)), 0))
    with pytest.raises(MukaiVectorError):
        moduli_invariants(example.data, MukaiVector(1, ZERO, 1))
    with pytest.raises(MukaiVectorError):
        polarized_example(1)
    print("✓ invalid Mukai vectors")


def test_polarized_examples():
    """Degree 2(n-1) with B = e1/2 lands in the U(2) family of K3^[n]."""
    for n in range(2, 6):
        example = polarized_example(n)
        invariants = moduli_invariants(example.data, example.twisted)
        assert invariants.n == n
        assert genus_match(invariants.picard.lattice, GenusTag.from_expression("U(2)"))
        expected = GenusTag.from_expression(f"U + U(2) + 2*E8 + <{-2 * (n - 1)}>")
        assert genus_match(invariants.transcendental.lattice, expected)
    print("✓ polarized examples, n = 2..5")


def test_double_plane():
    """The double plane with v = (0, 2h, 0) gives K3^[5] with Picard U(2)."""
    example = double_plane_example()
    assert example.twisted.square() == 8
    invariants = moduli_invariants(example.data, example.twisted)
    assert invariants.n == 5
    assert invariants.picard.rank == 2
    assert genus_match(invariants.picard.lattice, GenusTag.from_expression("U(2)"))
    assert genus_match(invariants.transcendental.lattice, GenusTag.from_expression("2*U + 2*E8 + <-8>"))
    print("✓ double plane")


def test_brauer_kernel():
    """A nontrivial class cuts out an index-two kernel; a trivial one keeps T."""
    data = double_plane_example().data
    kernel = brauer_kernel(data)
    assert kernel.index_in(data.transcendental) == 2
    assert all(data.alpha(row) == 0 for row in kernel.basis)

    trivial = TwistedSurfaceData(data.picard, BField(ZERO))
    assert trivial.b_field.is_trivial()
    assert brauer_kernel(trivial).index_in(trivial.transcendental) == 1
    print("✓ Brauer kernel")


def test_b_field_normalization():
    """2B is reduced mod 2 and then mod the Picard lattice."""
    picard = double_plane_example().data.picard
    assert BField(k3_row(e1=3)).normalized(picard).twice == k3_row(f1=1)
    assert BField(k3_row(e1=2, f1=4)).normalized(picard).is_trivial()

    # rank two: e1 + e2 = (f1 + e2) + (e1 + f1) mod 2, whatever the basis order
    for basis in ((k3_row(f1=1, e2=1), k3_row(e1=1, f1=1)), (k3_row(e1=1, f1=1), k3_row(f1=1, e2=1))):
        picard = PrimitiveSublattice(k3_lattice(), basis)
        assert BField(k3_row(e1=1, e2=1)).normalized(picard).is_trivial()
        assert BField(k3_row(e1=1)).normalized(picard) == BField(k3_row(e2=1)).normalized(picard)
        assert BField(k3_row(e1=1, e3=1)).normalized(picard) != BField(k3_row(e1=1)).normalized(picard)
    print("✓ B-field normalization")


def test_picard_must_live_in_k3():
    L = k3n_lattice(2)
    row = (1, 1) + (0,) * 21
    with pytest.raises(AmbientMismatchError):
        TwistedSurfaceData(PrimitiveSublattice(L, (row,)), BField(ZERO))
    assert TwistedSurfaceData(PrimitiveSublattice(k3_lattice(), (k3_row(e1=1, f1=1),)), BField(ZERO))
    print("✓ Picard ambient check")


def main():
    """Run all tests."""
    print("latclass Mukai Test Suite")
    print("=" * 40)
    test_pairing()
    test_triple_lattice()
    test_twist()
    test_positivity()
    test_invalid_vectors()
    test_polarized_examples()
    test_double_plane()
    test_brauer_kernel()
    test_b_field_normalization()
    test_picard_must_live_in_k3()
    print("\nAll Mukai tests passed!")


if __name__ == "__main__":
    main()
