"""
Integer and rational matrix helpers.

Thin wrappers around sympy's normal forms so the rest of the package can stay
with plain tuples of Python ints and fractions.Fraction.
"""

import logging
from fractions import Fraction
from math import lcm
from typing import List, Optional, Sequence, Tuple

from sympy import Matrix, Rational
from sympy.matrices.normalforms import (
    hermite_normal_form,
    invariant_factors as _sympy_invariant_factors,
    smith_normal_decomp,
)

logger = logging.getLogger(__name__)

Row = Tuple[int, ...]
RationalRow = Tuple[Fraction, ...]


def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    """Build a sympy Matrix from nested sequences of ints or Fractions."""
    return Matrix([[_to_sympy(x) for x in row] for row in rows])


def _to_sympy(value):
    if isinstance(value, Fraction):
        return Rational(value.numerator, value.denominator)
    return value


def to_fraction(value) -> Fraction:
    """Convert a sympy rational (or int) to a Fraction."""
    if isinstance(value, Fraction):
        return value
    value = Rational(value)
    return Fraction(int(value.p), int(value.q))


def int_rows(matrix: Matrix) -> List[Row]:
    return [tuple(int(matrix[i, j]) for j in range(matrix.cols)) for i in range(matrix.rows)]


def fraction_rows(matrix: Matrix) -> List[RationalRow]:
    return [tuple(to_fraction(matrix[i, j]) for j in range(matrix.cols)) for i in range(matrix.rows)]


def determinant(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    if not rows:
        return 1
    return int(to_matrix(rows).det(method="bareiss"))


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return to_matrix(rows).rank()


def rational_inverse(rows: Sequence[Sequence]) -> List[RationalRow]:
    return fraction_rows(to_matrix(rows).inv())


def inverse_product(a: Sequence[Sequence], b: Sequence[Sequence]) -> List[RationalRow]:
    """a^-1 b^-1 as exact fractions."""
    return fraction_rows(to_matrix(a).inv() * to_matrix(b).inv())


def congruent_gram(basis: Sequence[Sequence], gram: Sequence[Sequence]) -> List[RationalRow]:
    """basis * gram * basis^T in one sympy product."""
    if not basis:
        return []
    b = to_matrix(basis)
    return fraction_rows(b * to_matrix(gram) * b.T)


def reduce_mod2(vector: Sequence[int], rows: Sequence[Sequence[int]]) -> Row:
    """
    Canonical representative of vector in F_2^k modulo the span of rows.

    The rows are brought to reduced echelon form over F_2 and the vector is
    cleared at every pivot column, so equal classes give equal results.
    """
    echelon: List[List[int]] = []
    pivots: List[int] = []
    for row in rows:
        current = [x % 2 for x in row]
        for pivot, reduced in zip(pivots, echelon):
            if current[pivot]:
                current = [(x + y) % 2 for x, y in zip(current, reduced)]
        if not any(current):
            continue
        pivot = current.index(1)
        for i, reduced in enumerate(echelon):
            if reduced[pivot]:
                echelon[i] = [(x + y) % 2 for x, y in zip(reduced, current)]
        echelon.append(current)
        pivots.append(pivot)
    result = [x % 2 for x in vector]
    for pivot, reduced in zip(pivots, echelon):
        if result[pivot]:
            result = [(x + y) % 2 for x, y in zip(result, reduced)]
    return tuple(result)


def smith_decomposition(rows: Sequence[Sequence[int]]) -> Tuple[List[int], List[Row], List[Row]]:
    """
    Smith normal form with transforms.

    Returns (diagonal, s, t) with s * A * t = diag(diagonal) padded with zeros.
    Nonzero diagonal entries come first and are made non-negative.
    """
    matrix = to_matrix(rows)
    smf, s, t = smith_normal_decomp(matrix)
    diagonal = [int(smf[i, i]) for i in range(min(smf.rows, smf.cols))]
    s_rows = int_rows(s)
    for i, d in enumerate(diagonal):
        if d < 0:
            diagonal[i] = -d
            s_rows[i] = tuple(-x for x in s_rows[i])
    return diagonal, s_rows, int_rows(t)


def hermite_rows(rows: Sequence[Sequence[int]]) -> List[Row]:
    """
    Canonical basis of the row lattice spanned by `rows`.

    sympy's HNF works on columns, so the transpose is reduced and transposed back.
    Zero rows are dropped.
    """
    if not rows:
        return []
    reduced = hermite_normal_form(to_matrix(rows).T).T
    return [row for row in int_rows(reduced) if any(row)]


def left_kernel(rows: Sequence[Sequence[int]]) -> List[Row]:
    """Saturated basis of {c integral : c * A = 0}."""
    diagonal, s, _ = smith_decomposition(rows)
    r = sum(1 for d in diagonal if d != 0)
    return [tuple(row) for row in s[r:]]


def invariant_factors(orders: Sequence[int]) -> Tuple[int, ...]:
    """Invariant factors (> 1) of the abelian group Z/d_1 + ... + Z/d_k."""
    if not orders:
        return ()
    diagonal = Matrix.diag(*orders)
    return tuple(int(d) for d in _sympy_invariant_factors(diagonal) if abs(int(d)) > 1)


def solve_row_combination(basis: Sequence[Sequence[int]], vector: Sequence) -> Optional[RationalRow]:
    """
    Rational coefficients c with c * basis = vector, or None if vector is
    outside the rational row span. The basis must have full row rank.
    """
    b = to_matrix(basis)
    v = to_matrix([vector])
    gram = b * b.T
    coefficients = v * b.T * gram.inv()
    if coefficients * b != v:
        return None
    return fraction_rows(coefficients)[0]


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> List[tuple]:
    """Plain product of nested sequences; keeps ints as ints and Fractions exact."""
    columns = list(zip(*b))
    return [tuple(sum(x * y for x, y in zip(row, col)) for col in columns) for row in a]


def lcm_of_denominators(rows) -> int:
    result = 1
    for row in rows:
        for x in row:
            result = lcm(result, Fraction(x).denominator)
    return result
