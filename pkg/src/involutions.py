"""
Lattice involutions id_T + (-id_S), their action on the discriminant group,
and the discriminant-group cases for K3^[n]-type lattices.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

from .errors import (
    AmbientMismatchError,
    ExtensionObstructionError,
    HyperbolicityError,
    InconsistentInvolutionError,
    NoMatchingCaseError,
)
from .finite_forms import FiniteQuadraticForm, is_2_elementary, two_adic_valuation
from .integer_matrix import Row, determinant, invariant_factors, mat_mul, rational_inverse
from .lattice import Lattice, PrimitiveSublattice, Sublattice, orthogonal_complement

logger = logging.getLogger(__name__)

INVARIANT = "invariant"
COINVARIANT = "coinvariant"


@dataclass(frozen=True)
class LatticeInvolution:
    """
    An isometry of order two, x -> x R in row convention.

    invariant is the fixed sublattice T and coinvariant its complement S.
    discriminant_action is the sign by which R acts on A_L and
    glue_exponent is log2 of [L : T + S].
    """

    ambient: Lattice
    matrix: Tuple[Row, ...]
    invariant: PrimitiveSublattice
    coinvariant: PrimitiveSublattice
    discriminant_action: int
    glue_exponent: int

    def apply(self, vector) -> Row:
        return mat_mul([vector], self.matrix)[0]

    def negated(self) -> "LatticeInvolution":
        matrix = tuple(tuple(-x for x in row) for row in self.matrix)
        return LatticeInvolution(
            self.ambient, matrix, self.coinvariant, self.invariant,
            -self.discriminant_action, self.glue_exponent,
        )


def _discriminant_action(lattice: Lattice, matrix) -> int:
    presentation = lattice.discriminant
    if presentation.form.is_trivial():
        return 1
    plus = minus = True
    for w in presentation.dual_vectors:
        image = mat_mul([w], matrix)[0]
        if any(Fraction(a - b).denominator != 1 for a, b in zip(image, w)):
            plus = False
        if any(Fraction(a + b).denominator != 1 for a, b in zip(image, w)):
            minus = False
    if plus:
        return 1
    if minus:
        return -1
    raise ExtensionObstructionError("the extension acts on A_L by neither +1 nor -1")


def extend_reflection(lattice: Lattice, S: Sublattice) -> LatticeInvolution:
    """The integral extension of id on S-perp and -id on S."""
    if S.ambient != lattice:
        raise AmbientMismatchError("S is not a sublattice of the given lattice")
    S = PrimitiveSublattice(lattice, S.basis)
    T = orthogonal_complement(S)
    stacked = list(T.basis) + list(S.basis)
    signs = [1] * T.rank + [-1] * S.rank
    inverse = rational_inverse(stacked)
    scaled = [tuple(sign * x for x in row) for sign, row in zip(signs, stacked)]
    product = mat_mul(inverse, scaled)
    if any(x.denominator != 1 for row in product for x in row):
        raise ExtensionObstructionError("reflection in S does not extend to an integral isometry")
    matrix = tuple(tuple(int(x) for x in row) for row in product)

    size = lattice.rank
    identity = [tuple(1 if i == j else 0 for j in range(size)) for i in range(size)]
    if mat_mul(matrix, matrix) != identity:
        raise InconsistentInvolutionError("extension is not of order two")
    transposed = [tuple(col) for col in zip(*matrix)]
    if mat_mul(mat_mul(matrix, lattice.gram), transposed) != [tuple(row) for row in lattice.gram]:
        raise InconsistentInvolutionError("extension does not preserve the pairing")

    index = abs(determinant(stacked))
    exponent = two_adic_valuation(index)
    if 2 ** exponent != index:
        raise InconsistentInvolutionError(f"[L : T + S] = {index} is not a power of two")
    action = _discriminant_action(lattice, matrix)
    logger.debug("extended reflection: rank T = %d, rank S = %d, a = %d, action %+d",
                 T.rank, S.rank, exponent, action)
    return LatticeInvolution(lattice, matrix, T, S, action, exponent)


def two_elementary_side(involution: LatticeInvolution) -> str:
    """Which side is 2-elementary: the coinvariant one for action +1, else the invariant one."""
    if involution.discriminant_action == 1:
        side, sub = COINVARIANT, involution.coinvariant
    else:
        side, sub = INVARIANT, involution.invariant
    if not is_2_elementary(sub.lattice.discriminant_form):
        raise InconsistentInvolutionError(f"{side} lattice is not 2-elementary")
    return side


@dataclass(frozen=True)
class DiscriminantCase:
    """
    One of the cases i, ii, iii for 2(n-1) = 2^l m. The case is stated for
    (non-2-elementary side, 2-elementary side); swapped means that pair is (A_S, A_T).
    """

    label: str
    n: int
    l: int
    m: int
    a: int
    swapped: bool


def _group(*orders: int) -> Tuple[int, ...]:
    return invariant_factors(orders)


def classify_discriminant_case(n: int, A_T: FiniteQuadraticForm, A_S: FiniteQuadraticForm) -> DiscriminantCase:
    twice = 2 * (n - 1)
    l = two_adic_valuation(twice)
    m = twice >> l
    ratio, remainder = divmod(A_T.size * A_S.size, twice)
    a = two_adic_valuation(ratio) // 2 if ratio else 0
    if remainder or ratio != 4 ** a:
        raise NoMatchingCaseError(f"|A_T||A_S| = {A_T.size * A_S.size} is not 4^a * {twice}")

    orientations = ((A_T.invariant_factors, A_S.invariant_factors, False),
                    (A_S.invariant_factors, A_T.invariant_factors, True))
    cases = [("iii", l == 1 and a == 0, _group(m), _group(2))]
    cases.append(("i", True, _group(*([2] * a), twice), _group(*([2] * a))))
    if a >= 1:
        cases.append(("ii", True, _group(*([2] * (a - 1)), twice), _group(*([2] * (a + 1)))))
    for label, allowed, wanted_x, wanted_y in cases:
        if not allowed:
            continue
        for x, y, swapped in orientations:
            if x == wanted_x and y == wanted_y:
                return DiscriminantCase(label, n, l, m, a, swapped)
    raise NoMatchingCaseError(
        f"no case matches n = {n}, A_T = {A_T.describe()}, A_S = {A_S.describe()}"
    )


def is_specialization(S1: Sublattice, S2: Sublattice) -> bool:
    """True when S1 lies in S2."""
    if S1.ambient != S2.ambient:
        raise AmbientMismatchError("sublattices live in different ambient lattices")
    return S2.contains_sublattice(S1)


def family_dimension(T: Sublattice) -> int:
    sig = T.lattice.signature
    if sig.positive != 1:
        raise HyperbolicityError(f"T has signature {sig}, not (1, r-1)")
    if T.rank > 20:
        raise HyperbolicityError(f"T has rank {T.rank} > 20")
    return 21 - T.rank
