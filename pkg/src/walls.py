"""
Wall divisors for K3^[n]-type lattices and Kähler-type chambers of rank-2
invariant lattices.
"""

import logging
from dataclasses import dataclass, field
from math import gcd, isqrt
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import HyperbolicityError, UnknownFamilyError
from .integer_matrix import Row
from .lattice import Lattice, Sublattice, divisibility

logger = logging.getLogger(__name__)

ORBIT_NOTE = "deformation types per cited theorem"


@dataclass(frozen=True, order=True)
class WallPair:
    """(square, divisibility) of a wall divisor."""

    square: int
    divisibility: int

    def __str__(self) -> str:
        return f"({self.square},{self.divisibility})"


class WallPairSearch(NamedTuple):
    pairs: List[WallPair]
    exhaustive: bool


def _overlattice_walls(twice: int, k: int, s: int, index_bound: Optional[int]):
    """Walls of the even overlattices Zv + Z(cv + a)/m of <v, a>."""
    det = abs(twice * s - k * k)
    found = set()
    truncated = False
    for m in range(1, isqrt(det) + 1):
        if det % (m * m):
            continue
        if index_bound is not None and m > index_bound:
            truncated = True
            continue
        for c in range(m):
            p, rest = divmod(c * twice + k, m)
            if rest:
                continue
            numerator = c * c * twice + 2 * c * k + s
            if numerator % (2 * m * m):
                continue
            r = numerator // (m * m)
            g = gcd(p, twice)
            x, y = -p // g, twice // g
            square = x * x * twice + 2 * x * y * p + y * y * r
            found.add(WallPair(square, abs(y)))
    return found, truncated


def wall_pair_search(n: int, index_bound: Optional[int] = None) -> WallPairSearch:
    """
    Admissible (square, divisibility) pairs of wall divisors on K3^[n]-type.

    v has square 2(n-1); a ranges over classes with a^2 >= -2 and
    0 <= (a, v) <= n-1 spanning a hyperbolic plane with v. Every even
    overlattice of <v, a> keeping v primitive contributes the generator of
    v-perp, whose divisibility in M is its w-coefficient.
    """
    if n < 2:
        raise UnknownFamilyError(f"n must be at least 2, got {n}")
    half = n - 1
    twice = 2 * half
    pairs = set()
    exhaustive = True
    for k in range(half + 1):
        s = -2
        while twice * s < k * k:
            found, truncated = _overlattice_walls(twice, k, s, index_bound)
            pairs |= found
            exhaustive &= not truncated
            s += 2
    result = sorted(pairs, key=lambda p: (p.divisibility, -p.square))
    logger.debug("n = %d: %d wall pairs (exhaustive=%s)", n, len(result), exhaustive)
    return WallPairSearch(result, exhaustive)


def wall_pairs(n: int, index_bound: Optional[int] = None) -> List[WallPair]:
    return wall_pair_search(n, index_bound).pairs


@dataclass(frozen=True)
class WallClass:
    coordinates: Tuple[int, int]
    vector: Row
    square: int
    divisibility: int
    ray: Tuple[int, int]

    @property
    def pair(self) -> WallPair:
        return WallPair(self.square, self.divisibility)


class WallSearch(NamedTuple):
    walls: List[WallClass]
    exhaustive: bool
    bound: int


def _positive_vector(gram) -> Tuple[int, int]:
    """The first basis vector if it is positive, else the first positive vector of a growing box."""
    (a, b), (_, c) = gram
    if a > 0:
        return (1, 0)
    for radius in range(1, 64):
        for x in range(radius + 1):
            for y in range(-radius, radius + 1):
                if max(x, abs(y)) == radius and a * x * x + 2 * b * x * y + c * y * y > 0:
                    return (x, y)
    raise HyperbolicityError("no positive vector found")


def _default_bound(T: Lattice, pairs: Sequence[WallPair]) -> int:
    smallest = min((p.square for p in pairs), default=-2)
    return 4 * (abs(smallest) + abs(T.determinant))


def _search_box(sub: Sublattice, pairs: Sequence[WallPair], bound: int) -> List[WallClass]:
    (a, b), (_, c) = sub.gram
    wanted = {p.square for p in pairs}
    pair_set = set(pairs)
    squares = np.array(sorted(wanted), dtype=np.int64)
    ys = np.arange(-bound, bound + 1, dtype=np.int64)
    h = _positive_vector(sub.gram)
    walls = []
    for x in range(0, bound + 1):
        values = a * x * x + 2 * b * x * ys + c * ys * ys
        for y in ys[np.isin(values, squares)]:
            y = int(y)
            if (x == 0 and y <= 0) or gcd(x, y) != 1:
                continue
            vector = tuple(x * p + y * q for p, q in zip(*sub.basis))
            square = a * x * x + 2 * b * x * y + c * y * y
            div = divisibility(vector, sub.ambient)
            if WallPair(square, div) not in pair_set:
                continue
            ray = (-(b * x + c * y), a * x + b * y)
            if a * ray[0] * h[0] + b * (ray[0] * h[1] + ray[1] * h[0]) + c * ray[1] * h[1] < 0:
                ray = (-ray[0], -ray[1])
            walls.append(WallClass((x, y), vector, square, div, ray))
    return walls


def walls_in_T(T: Sublattice, pairs: Sequence[WallPair], bound: Optional[int] = None,
               doubling_check: bool = True) -> WallSearch:
    """
    Primitive wall classes of a rank-2 hyperbolic sublattice, up to sign.
    Divisibility is taken in the ambient lattice.
    """
    if T.rank != 2:
        raise HyperbolicityError(f"expected a rank-2 lattice, got rank {T.rank}")
    lattice = T.lattice
    if lattice.signature.positive != 1 or lattice.signature.negative != 1:
        raise HyperbolicityError(f"T has signature {lattice.signature}, not (1,1)")
    box = bound if bound is not None else _default_bound(lattice, pairs)
    walls = _search_box(T, pairs, box)
    exhaustive = True
    if doubling_check:
        exhaustive = len(_search_box(T, pairs, 2 * box)) == len(walls)
        if not exhaustive:
            logger.warning("wall search in %s changed when doubling the bound %d", lattice, box)
    walls.sort(key=lambda w: (w.square, w.divisibility, w.coordinates))
    logger.debug("found %d walls in T with bound %d", len(walls), box)
    return WallSearch(walls, exhaustive, box)


@dataclass(frozen=True)
class ChamberReport:
    lattice: Lattice
    walls: Tuple[WallClass, ...]
    chambers: int
    orbits: Optional[int]
    orbit_bounds: Tuple[int, int]
    separation: bool
    exhaustive: bool = True
    note: str = field(default=ORBIT_NOTE)


def count_chambers(T: Sublattice, walls: Sequence[WallClass], exhaustive: bool = True) -> ChamberReport:
    """
    Chambers cut out by the wall lines in the positive cone. Orbits equal
    chambers when the walls have pairwise distinct (square, divisibility).
    """
    lines = {tuple(w.ray) for w in walls}
    chambers = len(lines) + 1
    separation = len({w.pair for w in walls}) == len(walls)
    orbits = chambers if separation else None
    bounds = (chambers, chambers) if separation else (1, chambers)
    return ChamberReport(T.lattice, tuple(walls), chambers, orbits, bounds, separation, exhaustive)
