"""
Finite quadratic forms on finite abelian groups.

A form is stored as cyclic orders d_1, ..., d_k together with the Gram matrix
of its generators: q-values mod 2 on the diagonal, b-values mod 1 off it.
Elements are coordinate tuples reduced mod the orders.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm, prod
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import mpmath

from .errors import EnumerationBoundError, GaussSumError, GlueError, LatticeError
from .integer_matrix import hermite_rows, invariant_factors as _invariant_factors
from .integer_matrix import rational_inverse, smith_decomposition, mat_mul

logger = logging.getLogger(__name__)

Element = Tuple[int, ...]

DEFAULT_GROUP_BOUND = 2 ** 12
DEFAULT_GAUSS_DIGITS = 50
DEFAULT_GAUSS_TOLERANCE = "1e-20"


def _reduce_gram(gram: Sequence[Sequence]) -> Tuple[Tuple[Fraction, ...], ...]:
    size = len(gram)
    rows = []
    for i in range(size):
        row = []
        for j in range(size):
            value = Fraction(gram[i][j])
            row.append(value % 2 if i == j else value % 1)
        rows.append(tuple(row))
    return tuple(rows)


@dataclass(frozen=True)
class FiniteQuadraticForm:
    """Finite abelian group with a Q/2Z-valued quadratic form."""

    orders: Tuple[int, ...]
    gram: Tuple[Tuple[Fraction, ...], ...] = field(default=())

    def __post_init__(self):
        orders = tuple(int(d) for d in self.orders)
        if any(d <= 1 for d in orders):
            raise LatticeError(f"cyclic orders must exceed 1, got {orders}")
        if len(self.gram) != len(orders) or any(len(row) != len(orders) for row in self.gram):
            raise LatticeError("gram shape does not match the number of generators")
        gram = _reduce_gram(self.gram)
        for i, d in enumerate(orders):
            for j in range(len(orders)):
                if i != j and gram[i][j] != gram[j][i]:
                    raise LatticeError("bilinear form is not symmetric")
                if i != j and (d * gram[i][j]).denominator != 1:
                    raise LatticeError(f"b(e{i}, e{j}) is not killed by the order {d}")
            if (d * gram[i][i]).denominator != 1 or (d * d * gram[i][i]) % 2 != 0:
                raise LatticeError(f"q(e{i}) = {gram[i][i]} is ill-defined mod order {d}")
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "gram", gram)

    @classmethod
    def trivial(cls) -> "FiniteQuadraticForm":
        return cls((), ())

    @classmethod
    def cyclic(cls, order: int, value) -> "FiniteQuadraticForm":
        """Z/order with q(1) = value."""
        if order == 1:
            return cls.trivial()
        return cls((order,), ((Fraction(value),),))

    @property
    def size(self) -> int:
        return prod(self.orders)

    @property
    def ngens(self) -> int:
        return len(self.orders)

    @property
    def zero(self) -> Element:
        return tuple(0 for _ in self.orders)

    def is_trivial(self) -> bool:
        return self.size == 1

    def normalize(self, x: Sequence[int]) -> Element:
        return tuple(int(c) % d for c, d in zip(x, self.orders))

    def add(self, x: Element, y: Element) -> Element:
        return self.normalize([a + b for a, b in zip(x, y)])

    def scale(self, k: int, x: Element) -> Element:
        return self.normalize([k * a for a in x])

    def q(self, x: Sequence[int]) -> Fraction:
        total = Fraction(0)
        for i, xi in enumerate(x):
            if not xi:
                continue
            total += xi * xi * self.gram[i][i]
            for j in range(i + 1, len(x)):
                if x[j]:
                    total += 2 * xi * x[j] * self.gram[i][j]
        return total % 2

    def b(self, x: Sequence[int], y: Sequence[int]) -> Fraction:
        total = Fraction(0)
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, yj in enumerate(y):
                if yj:
                    total += xi * yj * self.gram[i][j]
        return total % 1

    def element_order(self, x: Sequence[int]) -> int:
        result = 1
        for c, d in zip(x, self.orders):
            result = lcm(result, d // gcd(c % d, d))
        return result

    def elements(self) -> Iterator[Element]:
        return itertools.product(*(range(d) for d in self.orders))

    @property
    def invariant_factors(self) -> Tuple[int, ...]:
        return _invariant_factors(self.orders)

    @property
    def length(self) -> int:
        """Minimal number of generators."""
        return len(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return lcm(*self.orders) if self.orders else 1

    def value_multiset(self) -> Tuple[Fraction, ...]:
        return tuple(sorted(self.q(x) for x in self.elements()))

    def direct_sum(self, other: "FiniteQuadraticForm") -> "FiniteQuadraticForm":
        k, m = self.ngens, other.ngens
        gram = [[Fraction(0)] * (k + m) for _ in range(k + m)]
        for i in range(k):
            for j in range(k):
                gram[i][j] = self.gram[i][j]
        for i in range(m):
            for j in range(m):
                gram[k + i][k + j] = other.gram[i][j]
        return FiniteQuadraticForm(self.orders + other.orders, tuple(map(tuple, gram)))

    def scaled(self, factor: int) -> "FiniteQuadraticForm":
        """The form factor * q; scaled(-1) is q(-1)."""
        gram = tuple(tuple(factor * x for x in row) for row in self.gram)
        return FiniteQuadraticForm(self.orders, gram)

    def describe(self) -> str:
        if self.is_trivial():
            return "0"
        parts = []
        diagonal = all(self.gram[i][j] == 0 for i in range(self.ngens) for j in range(self.ngens) if i != j)
        if diagonal:
            for i, d in enumerate(self.orders):
                parts.append(f"Z/{d}({_fmt(self.gram[i][i])})")
            return " + ".join(parts)
        group = " + ".join(f"Z/{d}" for d in self.orders)
        matrix = "; ".join(",".join(_fmt(x) for x in row) for row in self.gram)
        return f"{group} [{matrix}]"


def _fmt(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def _span(form: FiniteQuadraticForm, start: FrozenSet[Element], generator: Element) -> FrozenSet[Element]:
    multiples = [form.scale(k, generator) for k in range(form.element_order(generator))]
    return frozenset(form.add(x, m) for x in start for m in multiples)


@dataclass(frozen=True)
class Subgroup:
    """
    Subgroup of a finite quadratic form.

    generators are reduced: the product of relative_orders equals the order.
    """

    ambient: FiniteQuadraticForm
    generators: Tuple[Element, ...]
    relative_orders: Tuple[int, ...]
    elements: FrozenSet[Element] = field(compare=False, repr=False)

    @classmethod
    def from_elements(cls, ambient: FiniteQuadraticForm, elements: Iterable[Element]) -> "Subgroup":
        elements = frozenset(ambient.normalize(x) for x in elements)
        candidates = sorted(elements, key=lambda x: (-ambient.element_order(x), x))
        current = frozenset({ambient.zero})
        generators, relative = [], []
        for x in candidates:
            if x in current:
                continue
            grown = _span(ambient, current, x)
            generators.append(x)
            relative.append(len(grown) // len(current))
            current = grown
            if len(current) == len(elements):
                break
        if current != elements:
            raise LatticeError("element set is not a subgroup")
        return cls(ambient, tuple(generators), tuple(relative), current)

    @classmethod
    def generated_by(cls, ambient: FiniteQuadraticForm, generators: Iterable[Sequence[int]]) -> "Subgroup":
        current = frozenset({ambient.zero})
        for g in generators:
            current = _span(ambient, current, ambient.normalize(g))
        return cls.from_elements(ambient, current)

    @property
    def order(self) -> int:
        return len(self.elements)

    def is_isotropic(self) -> bool:
        return all(self.ambient.q(x) == 0 for x in self.elements)

    def orthogonal(self) -> FrozenSet[Element]:
        """Elements of the ambient group orthogonal to every generator."""
        return frozenset(
            x for x in self.ambient.elements()
            if all(self.ambient.b(x, g) == 0 for g in self.generators)
        )


def _check_group_bound(form: FiniteQuadraticForm, bound: int):
    if form.size > bound:
        raise EnumerationBoundError(f"group of order {form.size} exceeds enumeration bound {bound}")


def subgroups(q: FiniteQuadraticForm, order_bound: int,
              group_bound: int = DEFAULT_GROUP_BOUND) -> List[Subgroup]:
    """All subgroups of order at most order_bound, sorted by order then elements."""
    _check_group_bound(q, group_bound)
    zero = frozenset({q.zero})
    cyclic = set()
    for x in q.elements():
        cyclic.add(_span(q, zero, x))
    cyclic = sorted(cyclic, key=lambda s: (len(s), sorted(s)))

    found = {zero}
    frontier = [zero]
    while frontier:
        next_frontier = []
        for group in frontier:
            for c in cyclic:
                if c <= group:
                    continue
                joined = frozenset(q.add(x, y) for x in group for y in c)
                if len(joined) <= order_bound and joined not in found:
                    found.add(joined)
                    next_frontier.append(joined)
        frontier = next_frontier
    ordered = sorted(found, key=lambda s: (len(s), sorted(s)))
    logger.debug("enumerated %d subgroups of a group of order %d", len(ordered), q.size)
    return [Subgroup.from_elements(q, s) for s in ordered]


def quotient_form(form: FiniteQuadraticForm, upper: Sequence[Element],
                  lower: Sequence[Element]) -> FiniteQuadraticForm:
    """
    Induced form on <upper>/<lower>, assuming lower lies in upper and q is
    well defined on the quotient.
    """
    k = form.ngens
    if k == 0:
        return FiniteQuadraticForm.trivial()
    relations = [tuple(d if i == j else 0 for j in range(k)) for i, d in enumerate(form.orders)]
    basis = hermite_rows(list(upper) + relations)
    inverse = rational_inverse(basis)
    lower_rows = list(lower) + relations
    coordinates = mat_mul(lower_rows, inverse)
    if any(x.denominator != 1 for row in coordinates for x in row):
        raise LatticeError("lower subgroup is not contained in the upper one")
    coordinates = [tuple(int(x) for x in row) for row in coordinates]
    diagonal, _, t = smith_decomposition(coordinates)
    t_inverse = [tuple(int(x) for x in row) for row in rational_inverse(t)]

    orders, vectors = [], []
    for i, d in enumerate(diagonal[:k]):
        if d > 1:
            orders.append(d)
            vectors.append(mat_mul([t_inverse[i]], basis)[0])
    gram = [[Fraction(0)] * len(orders) for _ in orders]
    for i, x in enumerate(vectors):
        for j, y in enumerate(vectors):
            gram[i][j] = form.q(x) if i == j else form.b(x, y)
    return FiniteQuadraticForm(tuple(orders), tuple(map(tuple, gram)))


def perp_mod_H(q: FiniteQuadraticForm, H: Subgroup,
               group_bound: int = DEFAULT_GROUP_BOUND) -> FiniteQuadraticForm:
    """The form induced on H-perp / H for a totally isotropic H."""
    _check_group_bound(q, group_bound)
    if not H.is_isotropic():
        raise GlueError("subgroup is not totally isotropic")
    perp = Subgroup.from_elements(q, H.orthogonal())
    result = quotient_form(q, perp.generators, H.generators)
    assert result.size * H.order ** 2 == q.size
    return result


def find_isometry(q1: FiniteQuadraticForm, q2: FiniteQuadraticForm,
                  group_bound: int = DEFAULT_GROUP_BOUND) -> Optional[Tuple[Element, ...]]:
    """Images of the generators of q1 under some isometry onto q2, or None."""
    if q1.size != q2.size:
        return None
    _check_group_bound(q1, group_bound)
    if q1.invariant_factors != q2.invariant_factors:
        return None
    if q1.value_multiset() != q2.value_multiset():
        return None
    if q1.is_trivial():
        return ()

    targets = list(q2.elements())
    candidates = []
    for i, d in enumerate(q1.orders):
        value = q1.gram[i][i]
        candidates.append([y for y in targets if d % q2.element_order(y) == 0 and q2.q(y) == value])

    images: List[Element] = []

    def image_size() -> int:
        span = frozenset({q2.zero})
        for y in images:
            span = _span(q2, span, y)
        return len(span)

    def search(i: int) -> bool:
        if i == q1.ngens:
            return image_size() == q2.size
        for y in candidates[i]:
            if all(q2.b(y, images[j]) == q1.gram[i][j] for j in range(i)):
                images.append(y)
                if search(i + 1):
                    return True
                images.pop()
        return False

    return tuple(images) if search(0) else None


def is_isomorphic(q1: FiniteQuadraticForm, q2: FiniteQuadraticForm,
                  group_bound: int = DEFAULT_GROUP_BOUND) -> bool:
    return find_isometry(q1, q2, group_bound) is not None


def anti_isometries(H1: Subgroup, H2: Subgroup,
                    group_bound: int = DEFAULT_GROUP_BOUND) -> List[Dict[Element, Element]]:
    """All isomorphisms gamma: H1 -> H2 with q2(gamma x) = -q1(x)."""
    if H1.order != H2.order:
        return []
    if H1.order > group_bound:
        raise EnumerationBoundError(f"subgroup of order {H1.order} exceeds bound {group_bound}")
    a1, a2 = H1.ambient, H2.ambient
    gens = H1.generators
    orders = [a1.element_order(g) for g in gens]
    options = []
    for g, d in zip(gens, orders):
        wanted = (-a1.q(g)) % 2
        options.append(sorted(y for y in H2.elements if d % a2.element_order(y) == 0 and a2.q(y) == wanted))

    maps = []
    for images in itertools.product(*options):
        mapping: Dict[Element, Element] = {}
        consistent = True
        for coefficients in itertools.product(*(range(d) for d in orders)):
            x, y = a1.zero, a2.zero
            for c, g, h in zip(coefficients, gens, images):
                x = a1.add(x, a1.scale(c, g))
                y = a2.add(y, a2.scale(c, h))
            if mapping.setdefault(x, y) != y:
                consistent = False
                break
        if not consistent or len(set(mapping.values())) != H1.order:
            continue
        if all(a2.q(y) == (-a1.q(x)) % 2 for x, y in mapping.items()):
            maps.append(mapping)
    maps.sort(key=lambda m: sorted(m.items()))
    return maps


def milgram_signature(q: FiniteQuadraticForm, digits: int = DEFAULT_GAUSS_DIGITS,
                      tolerance: str = DEFAULT_GAUSS_TOLERANCE,
                      group_bound: int = DEFAULT_GROUP_BOUND) -> int:
    """Signature mod 8 read off the normalized Gauss sum of q."""
    _check_group_bound(q, group_bound)
    with mpmath.workdps(digits):
        total = mpmath.mpc(0)
        for x in q.elements():
            value = q.q(x)
            total += mpmath.expjpi(mpmath.mpf(value.numerator) / value.denominator)
        expected = mpmath.sqrt(q.size)
        tol = mpmath.mpf(tolerance)
        if abs(abs(total) - expected) > tol * expected:
            raise GaussSumError(f"Gauss sum modulus {mpmath.nstr(abs(total), 15)} != sqrt({q.size})")
        eighths = mpmath.arg(total) * 4 / mpmath.pi
        residue = mpmath.nint(eighths)
        if abs(eighths - residue) > tol * 8:
            raise GaussSumError(f"Gauss sum phase {mpmath.nstr(eighths, 15)}/8 is not a multiple of 1/8 turn")
        return int(residue) % 8


def is_2_elementary(q: FiniteQuadraticForm) -> bool:
    return all(d == 2 for d in q.invariant_factors)


def graph_subgroup(form: FiniteQuadraticForm, elements: Iterable[Sequence[int]]) -> Subgroup:
    """Subgroup of a direct-sum form generated by glue elements."""
    return Subgroup.generated_by(form, elements)


def two_adic_valuation(n: int) -> int:
    n = abs(n)
    count = 0
    while n and n % 2 == 0:
        n //= 2
        count += 1
    return count

