"""
Mukai lattice of a K3 surface, B-field lifts of order-two Brauer classes,
and the lattice invariants of moduli spaces of twisted sheaves.

Triples (r, H, s) are stored as rows of length 24: r first, then H in the
K3 lattice basis, then s.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd
from typing import Callable, NamedTuple, Tuple

from .errors import AmbientMismatchError, IntegralityError, MukaiVectorError
from .integer_matrix import Row, reduce_mod2
from .lattice import (
    Lattice,
    PrimitiveSublattice,
    Sublattice,
    intersect_with_orthogonal,
    k3_lattice,
    mukai_lattice,
    orthogonal_complement,
    pairing,
    saturation,
)

logger = logging.getLogger(__name__)

K3_RANK = 22


@dataclass(frozen=True)
class MukaiVector:
    r: int
    H: Row
    s: int

    def __post_init__(self):
        H = tuple(int(x) for x in self.H)
        if len(H) != K3_RANK:
            raise AmbientMismatchError(f"H must have {K3_RANK} coordinates, got {len(H)}")
        object.__setattr__(self, "H", H)

    @classmethod
    def from_row(cls, row) -> "MukaiVector":
        return cls(int(row[0]), tuple(row[1:-1]), int(row[-1]))

    def as_row(self) -> Row:
        return (self.r,) + self.H + (self.s,)

    def is_primitive(self) -> bool:
        result = 0
        for x in self.as_row():
            result = gcd(result, x)
        return result == 1

    def square(self) -> int:
        return mukai_pairing(self, self)

    def __str__(self) -> str:
        nonzero = ", ".join(f"{i}:{x}" for i, x in enumerate(self.H) if x)
        return f"({self.r}, [{nonzero}], {self.s})"


def mukai_pairing(v: MukaiVector, w: MukaiVector) -> int:
    """H.H' - r s' - r' s."""
    return pairing(k3_lattice().gram, v.H, w.H) - v.r * w.s - w.r * v.s


@lru_cache(maxsize=1)
def mukai_triple_lattice() -> Lattice:
    """The pairing on triples as a Gram matrix; isometric to M."""
    k3 = k3_lattice().gram
    size = K3_RANK + 2
    rows = [[0] * size for _ in range(size)]
    for i in range(K3_RANK):
        for j in range(K3_RANK):
            rows[i + 1][j + 1] = k3[i][j]
    rows[0][size - 1] = rows[size - 1][0] = -1
    lattice = Lattice(tuple(map(tuple, rows)), "H*")
    reference = mukai_lattice()
    if lattice.signature != reference.signature or not lattice.is_unimodular():
        raise AmbientMismatchError("triple pairing is not isometric to the Mukai lattice")
    return lattice


@dataclass(frozen=True)
class BField:
    """A lift B of an order-two Brauer class, stored as the integral row 2B."""

    twice: Row

    def __post_init__(self):
        twice = tuple(int(x) for x in self.twice)
        if len(twice) != K3_RANK:
            raise AmbientMismatchError(f"2B must have {K3_RANK} coordinates, got {len(twice)}")
        object.__setattr__(self, "twice", twice)

    @classmethod
    def from_rational(cls, row) -> "BField":
        twice = [Fraction(x) * 2 for x in row]
        if any(x.denominator != 1 for x in twice):
            raise IntegralityError("2B is not integral")
        return cls(tuple(int(x) for x in twice))

    @property
    def B(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(x, 2) for x in self.twice)

    def is_trivial(self) -> bool:
        return all(x % 2 == 0 for x in self.twice)

    def normalized(self, picard: Sublattice) -> "BField":
        """
        Canonical representative modulo H^2 + NS/2: 2B is reduced mod 2 and
        cleared at the pivots of the Picard basis in echelon form over F_2.
        """
        return BField(reduce_mod2(self.twice, picard.basis))


@dataclass(frozen=True)
class TwistedSurfaceData:
    """Picard sublattice of the K3 lattice with a B-field."""

    picard: PrimitiveSublattice
    b_field: BField

    def __post_init__(self):
        if self.picard.ambient != k3_lattice():
            raise AmbientMismatchError("Picard sublattice must live in the K3 lattice")

    @cached_property
    def transcendental(self) -> PrimitiveSublattice:
        return orthogonal_complement(self.picard)

    def alpha(self, vector) -> int:
        """The Brauer class as a homomorphism to Z/2: x -> (2B, x) mod 2."""
        return pairing(self.picard.ambient.gram, self.b_field.twice, vector) % 2


def twist(v: MukaiVector, b_field: BField) -> MukaiVector:
    """v_B = (r, H + rB, s + B.H + r B^2 / 2)."""
    gram = k3_lattice().gram
    B = b_field.B
    H = [h + v.r * b for h, b in zip(v.H, B)]
    s = v.s + pairing(gram, B, v.H) + Fraction(v.r, 2) * pairing(gram, B, B)
    if any(Fraction(x).denominator != 1 for x in H) or Fraction(s).denominator != 1:
        raise IntegralityError(f"twist of {v} by B is not integral")
    return MukaiVector(v.r, tuple(int(x) for x in H), int(s))


def ample_multiple(ample: Row) -> Callable[[Row], bool]:
    """Effectivity hook for Picard rank one: H is a positive multiple of the ample class."""
    ample = tuple(ample)

    def effective(H: Row) -> bool:
        pivot = next(i for i, x in enumerate(ample) if x)
        k, rest = divmod(H[pivot], ample[pivot])
        return rest == 0 and k > 0 and tuple(k * x for x in ample) == tuple(H)

    return effective


def is_positive(v: MukaiVector, effective: Callable[[Row], bool]) -> bool:
    if v.r > 0:
        return True
    if v.r < 0:
        return False
    if any(v.H):
        return effective(v.H)
    return v.s > 0


def brauer_kernel(data: TwistedSurfaceData) -> Sublattice:
    """ker(alpha) inside the transcendental lattice, of index 1 or 2."""
    basis = data.transcendental.basis
    values = [data.alpha(row) for row in basis]
    if not any(values):
        return Sublattice(data.picard.ambient, basis)
    j = values.index(1)
    pivot = basis[j]
    rows = []
    for i, (row, value) in enumerate(zip(basis, values)):
        if i == j:
            rows.append(tuple(2 * x for x in row))
        elif value:
            rows.append(tuple(x - y for x, y in zip(row, pivot)))
        else:
            rows.append(row)
    logger.debug("Brauer kernel has index 2 in a transcendental lattice of rank %d", len(basis))
    return Sublattice(data.picard.ambient, tuple(rows))


class ModuliInvariants(NamedTuple):
    n: int
    picard: PrimitiveSublattice
    transcendental: Sublattice


def _embed(H: Row) -> Row:
    return (0,) + tuple(H) + (0,)


def moduli_invariants(data: TwistedSurfaceData, v_B: MukaiVector) -> ModuliInvariants:
    """
    Lattice invariants of the moduli space of alpha-twisted sheaves with
    Mukai vector v_B.
    """
    if not v_B.is_primitive():
        raise MukaiVectorError(f"{v_B} is not primitive")
    square = v_B.square()
    if square < 2:
        raise MukaiVectorError(f"{v_B} has square {square} < 2")
    n = square // 2 + 1

    triples = mukai_triple_lattice()
    generators = [_embed(row) for row in data.picard.basis]
    generators.append((0,) * (K3_RANK + 1) + (1,))
    generators.append((2,) + data.b_field.twice + (0,))
    twisted_picard = saturation(generators, triples)
    picard = intersect_with_orthogonal(twisted_picard, v_B.as_row())
    transcendental = brauer_kernel(data)
    if picard.rank + transcendental.rank != triples.rank - 1:
        raise MukaiVectorError("Picard and transcendental ranks do not fill v_B-perp")
    logger.debug("moduli of %s: n = %d, Picard rank %d", v_B, n, picard.rank)
    return ModuliInvariants(n, picard, transcendental)


class TwistedExample(NamedTuple):
    data: TwistedSurfaceData
    vector: MukaiVector
    twisted: MukaiVector


def _k3_row(**coefficients: int) -> Row:
    positions = {"e1": 0, "f1": 1, "e2": 2, "f2": 3, "e3": 4, "f3": 5}
    row = [0] * K3_RANK
    for name, value in coefficients.items():
        row[positions[name]] += value
    return tuple(row)


def polarized_example(n: int) -> TwistedExample:
    """Picard rank one of degree 2(n-1) with B = e1/2 and v = (0, h, 0)."""
    if n < 2:
        raise MukaiVectorError(f"n must be at least 2, got {n}")
    h = _k3_row(e3=1, f3=n - 1)
    data = TwistedSurfaceData(PrimitiveSublattice(k3_lattice(), (h,)), BField(_k3_row(e1=1)))
    v = MukaiVector(0, h, 0)
    return TwistedExample(data, v, twist(v, data.b_field))


def double_plane_example() -> TwistedExample:
    """A degree-two K3 with B = f1/2 and v = (0, 2h, 0), so v_B = (0, 2h, 1)."""
    h = _k3_row(e1=1, f1=1)
    data = TwistedSurfaceData(PrimitiveSublattice(k3_lattice(), (h,)), BField(_k3_row(f1=1)))
    v = MukaiVector(0, tuple(2 * x for x in h), 0)
    return TwistedExample(data, v, twist(v, data.b_field))
