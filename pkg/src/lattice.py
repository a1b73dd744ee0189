"""
Even integral lattices, their sublattices and overlattices.

Vectors are integer rows in the lattice basis; the pairing is x G y^T.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd
from typing import List, Optional, Sequence, Tuple

from .errors import (
    AmbientMismatchError,
    DegenerateLatticeError,
    DependentRowsError,
    GlueError,
    NotSaturatedError,
    OddLatticeError,
    UnknownFamilyError,
    ZeroVectorError,
)
from .finite_forms import FiniteQuadraticForm, Subgroup
from .integer_matrix import (
    Row,
    congruent_gram,
    determinant,
    hermite_rows,
    inverse_product,
    lcm_of_denominators,
    left_kernel,
    mat_mul,
    rank as matrix_rank,
    rational_inverse,
    smith_decomposition,
    solve_row_combination,
)

logger = logging.getLogger(__name__)

E8_EDGES = ((0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3))


@dataclass(frozen=True)
class Signature:
    """Inertia counts of a non-degenerate form."""

    positive: int
    negative: int

    @property
    def rank(self) -> int:
        return self.positive + self.negative

    @property
    def value(self) -> int:
        return self.positive - self.negative

    def __str__(self) -> str:
        return f"({self.positive},{self.negative})"


def pairing(gram, x, y):
    """x G y^T for rows of ints or Fractions."""
    return sum(x[i] * gram[i][j] * y[j] for i in range(len(x)) if x[i] for j in range(len(y)) if y[j])


def _congruence_signature(gram: Sequence[Sequence[int]]) -> Signature:
    """Symmetric Gaussian elimination over Q with pivot exchange."""
    a = [[Fraction(x) for x in row] for row in gram]
    positive = negative = 0
    while a:
        size = len(a)
        pivot = next((i for i in range(size) if a[i][i] != 0), None)
        if pivot is None:
            pair = next(((i, j) for i in range(size) for j in range(size) if a[i][j] != 0), None)
            if pair is None:
                raise DegenerateLatticeError("form has a radical")
            i, j = pair
            # x_i -> x_i + x_j makes the i-th diagonal 2 a_ij
            for k in range(size):
                a[i][k] += a[j][k]
            for k in range(size):
                a[k][i] += a[k][j]
            pivot = i
        a[0], a[pivot] = a[pivot], a[0]
        for row in a:
            row[0], row[pivot] = row[pivot], row[0]
        head = a[0][0]
        if head > 0:
            positive += 1
        else:
            negative += 1
        a = [
            [a[r][c] - a[r][0] * a[0][c] / head for c in range(1, size)]
            for r in range(1, size)
        ]
    return Signature(positive, negative)


@dataclass(frozen=True)
class Lattice:
    """An even non-degenerate lattice given by its Gram matrix."""

    gram: Tuple[Tuple[int, ...], ...]
    label: str = field(default="", compare=False)

    def __post_init__(self):
        gram = tuple(tuple(int(x) for x in row) for row in self.gram)
        size = len(gram)
        if any(len(row) != size for row in gram):
            raise DegenerateLatticeError("Gram matrix is not square")
        for i in range(size):
            if gram[i][i] % 2:
                raise OddLatticeError(f"diagonal entry {gram[i][i]} is odd")
            for j in range(i + 1, size):
                if gram[i][j] != gram[j][i]:
                    raise DegenerateLatticeError("Gram matrix is not symmetric")
        object.__setattr__(self, "gram", gram)
        if self.determinant == 0:
            raise DegenerateLatticeError("Gram matrix is singular")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def determinant(self) -> int:
        return determinant(self.gram)

    @cached_property
    def signature(self) -> Signature:
        return _congruence_signature(self.gram)

    @cached_property
    def discriminant(self) -> "DiscriminantPresentation":
        return discriminant_presentation(self)

    @property
    def discriminant_form(self) -> FiniteQuadraticForm:
        return self.discriminant.form

    def is_unimodular(self) -> bool:
        return abs(self.determinant) == 1

    def pairing(self, x: Sequence, y: Sequence):
        return pairing(self.gram, x, y)

    def square(self, x: Sequence):
        return pairing(self.gram, x, x)

    def direct_sum(self, other: "Lattice") -> "Lattice":
        k, m = self.rank, other.rank
        rows = [list(row) + [0] * m for row in self.gram]
        rows += [[0] * k + list(row) for row in other.gram]
        label = " + ".join(x for x in (self.label, other.label) if x)
        return Lattice(tuple(map(tuple, rows)), label)

    def rescaled(self, factor: int) -> "Lattice":
        if factor == 0:
            raise DegenerateLatticeError("rescaling factor must be nonzero")
        label = f"{self.label}({factor})" if self.label else ""
        return Lattice(tuple(tuple(factor * x for x in row) for row in self.gram), label)

    def with_label(self, label: str) -> "Lattice":
        return Lattice(self.gram, label)

    def basis_vector(self, index: int) -> Row:
        return tuple(1 if i == index else 0 for i in range(self.rank))

    def __str__(self) -> str:
        return self.label or f"Lattice(rank={self.rank}, det={self.determinant})"


def signature(lattice: Lattice) -> Signature:
    return lattice.signature


# ---------------------------------------------------------------------------
# Standard families


def hyperbolic_plane(m: int = 1) -> Lattice:
    if m == 0:
        raise DegenerateLatticeError("rescaling factor must be nonzero")
    return Lattice(((0, m), (m, 0)), "U" if m == 1 else f"U({m})")


def e8(m: int = 1) -> Lattice:
    """The E8 root lattice, negative definite."""
    if m == 0:
        raise DegenerateLatticeError("rescaling factor must be nonzero")
    rows = [[0] * 8 for _ in range(8)]
    for i in range(8):
        rows[i][i] = -2 * m
    for i, j in E8_EDGES:
        rows[i][j] = rows[j][i] = m
    return Lattice(tuple(map(tuple, rows)), "E8" if m == 1 else f"E8({m})")


def rank_one(t: int) -> Lattice:
    if t == 0:
        raise DegenerateLatticeError("<0> is degenerate")
    if t % 2:
        raise OddLatticeError(f"<{t}> is odd")
    return Lattice(((t,),), f"<{t}>")


def direct_sum(*lattices: Lattice) -> Lattice:
    result = Lattice((), "")
    for lattice in lattices:
        result = result.direct_sum(lattice)
    return result


@lru_cache(maxsize=None)
def k3_lattice() -> Lattice:
    u = hyperbolic_plane()
    return direct_sum(u, u, u, e8(), e8()).with_label("U^3 + E8^2")


@lru_cache(maxsize=None)
def k3n_lattice(n: int) -> Lattice:
    """H^2 lattice of K3^[n]-type: U^3 + E8^2 + <-2(n-1)>."""
    if n < 2:
        raise UnknownFamilyError(f"L[{n}] requires n >= 2")
    return k3_lattice().direct_sum(rank_one(-2 * (n - 1))).with_label(f"L[{n}]")


@lru_cache(maxsize=None)
def mukai_lattice() -> Lattice:
    u = hyperbolic_plane()
    return direct_sum(u, u, u, u, e8(), e8()).with_label("M")


def make_standard(descriptor: str) -> Lattice:
    """
    Build a lattice from a descriptor such as "U(2)", "E8", "<-4>", "L[3]",
    "M" or a sum like "2*U + 2*E8 + <-2>".
    """
    from .expression_parser import build_lattice, parse_lattice

    return build_lattice(parse_lattice(descriptor))


# ---------------------------------------------------------------------------
# Discriminant groups


@dataclass(frozen=True)
class DiscriminantPresentation:
    """A_L together with dual vectors lifting its generators."""

    lattice: Lattice
    form: FiniteQuadraticForm
    dual_vectors: Tuple[Tuple[Fraction, ...], ...]
    coordinate_columns: Tuple[Tuple[int, ...], ...]

    def class_of(self, dual_vector: Sequence) -> Tuple[int, ...]:
        """Coordinates in A_L of a vector of the dual lattice."""
        image = mat_mul([dual_vector], self.lattice.gram)[0]
        if any(Fraction(x).denominator != 1 for x in image):
            raise GlueError("vector is not in the dual lattice")
        coordinates = []
        for column, d in zip(self.coordinate_columns, self.form.orders):
            value = sum(Fraction(x) * c for x, c in zip(image, column))
            coordinates.append(int(value) % d)
        return tuple(coordinates)

    def lift(self, element: Sequence[int]) -> Tuple[Fraction, ...]:
        """A dual vector representing an element of A_L."""
        vector = [Fraction(0)] * self.lattice.rank
        for c, w in zip(element, self.dual_vectors):
            if c:
                vector = [x + c * y for x, y in zip(vector, w)]
        return tuple(vector)


def discriminant_presentation(lattice: Lattice) -> DiscriminantPresentation:
    if lattice.rank == 0:
        return DiscriminantPresentation(lattice, FiniteQuadraticForm.trivial(), (), ())
    diagonal, _, t = smith_decomposition(lattice.gram)
    dual_all = inverse_product(t, lattice.gram)

    kept = [i for i, d in enumerate(diagonal) if d > 1]
    orders = tuple(diagonal[i] for i in kept)
    dual = tuple(tuple(dual_all[i]) for i in kept)
    columns = tuple(tuple(row[i] for row in t) for i in kept)
    form = FiniteQuadraticForm(orders, tuple(congruent_gram(dual, lattice.gram)))
    logger.debug("discriminant of %s: %s", lattice, form.describe())
    return DiscriminantPresentation(lattice, form, dual, columns)


def discriminant_group(lattice: Lattice) -> FiniteQuadraticForm:
    return lattice.discriminant.form


# ---------------------------------------------------------------------------
# Sublattices


@dataclass(frozen=True)
class Sublattice:
    """A sublattice of an ambient lattice spanned by independent integer rows."""

    ambient: Lattice
    basis: Tuple[Row, ...]

    def __post_init__(self):
        basis = tuple(tuple(int(x) for x in row) for row in self.basis)
        if any(len(row) != self.ambient.rank for row in basis):
            raise DependentRowsError("basis rows do not match the ambient rank")
        if basis and matrix_rank(basis) != len(basis):
            raise DependentRowsError("basis rows are linearly dependent")
        object.__setattr__(self, "basis", basis)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @cached_property
    def gram(self) -> Tuple[Tuple[int, ...], ...]:
        g = self.ambient.gram
        return tuple(tuple(pairing(g, x, y) for y in self.basis) for x in self.basis)

    @cached_property
    def lattice(self) -> Lattice:
        return Lattice(self.gram)

    def coordinates(self, vector: Sequence[int]) -> Optional[Tuple[Fraction, ...]]:
        if not self.basis:
            return () if not any(vector) else None
        return solve_row_combination(self.basis, vector)

    def contains(self, vector: Sequence[int]) -> bool:
        coordinates = self.coordinates(vector)
        return coordinates is not None and all(c.denominator == 1 for c in coordinates)

    def contains_sublattice(self, other: "Sublattice") -> bool:
        if other.ambient != self.ambient:
            raise AmbientMismatchError("sublattices live in different ambient lattices")
        return all(self.contains(row) for row in other.basis)

    def is_saturated(self) -> bool:
        if not self.basis:
            return True
        diagonal, _, _ = smith_decomposition(self.basis)
        return all(d == 1 for d in diagonal[: self.rank])

    def index_in(self, other: "Sublattice") -> int:
        """[other : self] for a full-rank sublattice self of other."""
        if other.ambient != self.ambient:
            raise AmbientMismatchError("sublattices live in different ambient lattices")
        if self.rank != other.rank or not other.contains_sublattice(self):
            raise DependentRowsError("not a finite-index sublattice")
        rows = [tuple(int(c) for c in other.coordinates(row)) for row in self.basis]
        return abs(determinant(rows))


@dataclass(frozen=True)
class PrimitiveSublattice(Sublattice):
    """A saturated sublattice."""

    def __post_init__(self):
        super().__post_init__()
        if not self.is_saturated():
            raise NotSaturatedError("basis does not span a primitive sublattice")


def saturation(rows: Sequence[Sequence[int]], ambient: Lattice) -> PrimitiveSublattice:
    """The smallest primitive sublattice containing the rows."""
    rows = [tuple(int(x) for x in row) for row in rows]
    if not rows:
        return PrimitiveSublattice(ambient, ())
    if matrix_rank(rows) != len(rows):
        raise DependentRowsError("rows are linearly dependent")
    _, _, t = smith_decomposition(rows)
    t_inverse = [tuple(int(x) for x in row) for row in rational_inverse(t)]
    return PrimitiveSublattice(ambient, tuple(hermite_rows(t_inverse[: len(rows)])))


def orthogonal_complement(sub: Sublattice) -> PrimitiveSublattice:
    if not sub.is_saturated():
        raise NotSaturatedError("saturate the sublattice before taking its complement")
    ambient = sub.ambient
    if not sub.basis:
        return PrimitiveSublattice(ambient, tuple(ambient.basis_vector(i) for i in range(ambient.rank)))
    pairings = mat_mul(sub.basis, ambient.gram)
    transposed = [tuple(col) for col in zip(*pairings)]
    kernel = left_kernel(transposed)
    return PrimitiveSublattice(ambient, tuple(hermite_rows(kernel)) if kernel else ())


def intersect_with_orthogonal(sub: Sublattice, vector: Sequence[int]) -> Sublattice:
    """Vectors of sub orthogonal to the given ambient vector."""
    column = [(pairing(sub.ambient.gram, row, vector),) for row in sub.basis]
    if all(c[0] == 0 for c in column):
        return sub
    kernel = left_kernel(column)
    rows = tuple(hermite_rows(mat_mul(kernel, sub.basis))) if kernel else ()
    cls = PrimitiveSublattice if isinstance(sub, PrimitiveSublattice) else Sublattice
    return cls(sub.ambient, rows)


def divisibility(vector: Sequence[int], lattice: Lattice) -> int:
    """gcd of the pairings of vector with the whole lattice."""
    if not any(vector):
        raise ZeroVectorError("divisibility of the zero vector is undefined")
    result = 0
    for value in mat_mul([vector], lattice.gram)[0]:
        result = gcd(result, int(value))
    return result


# ---------------------------------------------------------------------------
# Overlattices


@dataclass(frozen=True)
class GluedLattice:
    """An overlattice of T + S with the positions of T and S inside it."""

    lattice: Lattice
    basis: Tuple[Tuple[Fraction, ...], ...]
    invariant: PrimitiveSublattice
    coinvariant: PrimitiveSublattice
    glue: Subgroup

    @property
    def index(self) -> int:
        return self.glue.order


def glue_overlattice(T: Lattice, S: Lattice, glue: Sequence[Sequence[int]]) -> GluedLattice:
    """
    Overlattice of T + S determined by glue elements of A_T + A_S, written in
    the generator coordinates of both discriminant groups.
    """
    pt, ps = T.discriminant, S.discriminant
    kt = pt.form.ngens
    form = pt.form.direct_sum(ps.form)
    subgroup = Subgroup.generated_by(form, glue)
    if not subgroup.is_isotropic():
        raise GlueError("glue subgroup is not totally isotropic")
    for x in subgroup.elements:
        if x == form.zero:
            continue
        if not any(x[:kt]) or not any(x[kt:]):
            raise GlueError(f"glue element {x} has a trivial projection")

    total = T.direct_sum(S)
    size = total.rank
    rows: List[Tuple[Fraction, ...]] = [tuple(Fraction(x) for x in total.basis_vector(i)) for i in range(size)]
    for g in subgroup.generators:
        rows.append(pt.lift(g[:kt]) + ps.lift(g[kt:]))
    denominator = lcm_of_denominators(rows)
    scaled = [tuple(int(x * denominator) for x in row) for row in rows]
    basis = tuple(tuple(Fraction(x, denominator) for x in row) for row in hermite_rows(scaled))

    gram = [[pairing(total.gram, x, y) for y in basis] for x in basis]
    if any(Fraction(x).denominator != 1 for row in gram for x in row):
        raise GlueError("glue does not define an integral overlattice")
    lattice = Lattice(tuple(tuple(int(x) for x in row) for row in gram))

    inverse = rational_inverse(basis)
    embedded = [tuple(int(x) for x in row) for row in inverse]
    invariant = PrimitiveSublattice(lattice, tuple(embedded[: T.rank]))
    coinvariant = PrimitiveSublattice(lattice, tuple(embedded[T.rank:]))
    assert abs(lattice.determinant) * subgroup.order ** 2 == abs(T.determinant * S.determinant)
    logger.debug("glued %s and %s along a subgroup of order %d", T, S, subgroup.order)
    return GluedLattice(lattice, basis, invariant, coinvariant, subgroup)


def overlattice_from_glue(T: Lattice, S: Lattice, glue: Sequence[Sequence[int]]) -> Lattice:
    return glue_overlattice(T, S, glue).lattice
