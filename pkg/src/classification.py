"""
Rank-one and rank-two invariant lattices of non-symplectic involutions on
K3^[n]-type, with explicit representatives in L[n].

L[n] basis order: e1, f1, e2, f2, e3, f3, E8, E8, g with g^2 = -2(n-1).
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .embeddings import GenusTag, genus_match, orthogonal_in_mukai, rank1_embedding_classes
from .errors import LatticeError, UnknownFamilyError
from .finite_forms import DEFAULT_GROUP_BOUND, FiniteQuadraticForm, is_isomorphic
from .integer_matrix import Row, mat_mul
from .involutions import (
    DiscriminantCase,
    LatticeInvolution,
    classify_discriminant_case,
    extend_reflection,
    family_dimension,
    two_elementary_side,
)
from .lattice import (
    Lattice,
    PrimitiveSublattice,
    Signature,
    direct_sum,
    k3n_lattice,
    make_standard,
    orthogonal_complement,
)
from .walls import ChamberReport, count_chambers, wall_pairs, walls_in_T

logger = logging.getLogger(__name__)

VERIFIED_RANGE = range(2, 6)
CITED_UNIQUENESS = "uniqueness per cited theorem"
UNVERIFIED = "unverified representative"
OUTSIDE_RANGE = f"{UNVERIFIED} (genus checked; list completeness not established)"

_POSITIONS = {"e1": 0, "f1": 1, "e2": 2, "f2": 3, "e3": 4, "f3": 5, "g": 22}


def ln_vector(**coefficients: int) -> Row:
    """A vector of L[n] written in the named basis vectors e1..f3 and g."""
    row = [0] * 23
    for name, value in coefficients.items():
        row[_POSITIONS[name]] += value
    return tuple(row)


def two_square_representations(N: int) -> List[Tuple[int, int]]:
    """Coprime (x, y) with x >= y >= 0 and x^2 + y^2 = N."""
    result = []
    for y in range(isqrt(N // 2) + 1):
        x = isqrt(N - y * y)
        if x * x + y * y == N and x >= y and gcd(x, y) == 1:
            result.append((x, y))
    return result


def _square_root_of_minus_one(N: int) -> Optional[int]:
    for c in range(N):
        if (c * c + 1) % N == 0:
            return c
    return None


def rank1_fingerprints(n: int) -> Dict[Tuple[int, int], str]:
    """(square, divisibility) of rank-one invariant generators, by family."""
    N = n - 1
    prints = {(2, 1): "t2-div1"}
    if n % 4 == 0:
        prints[(2, 2)] = "t2-div2"
    if two_square_representations(N):
        prints.setdefault((2 * N, N), "t2n")
    return prints


def rank1_fingerprint(n: int, square: int, div: int) -> Optional[str]:
    return rank1_fingerprints(n).get((square, div))


@dataclass(frozen=True)
class FamilyCandidate:
    family_id: str
    rank: int
    action: int
    t_display: str
    s_display: str
    exists: bool
    t_genus: Optional[GenusTag] = None
    s_genus: Optional[GenusTag] = None
    basis: Optional[Tuple[Row, ...]] = None


@dataclass(frozen=True)
class FamilyRecord:
    """One row of the classification, with its verification status."""

    family_id: str
    n: int
    rank: int
    action: int
    t_display: str
    s_display: str
    exists: bool
    involution: Optional[LatticeInvolution] = field(default=None, repr=False, compare=False)
    case: Optional[DiscriminantCase] = None
    verified: bool = False
    uniqueness_note: str = ""
    dimension: int = 0
    t_genus: Optional[GenusTag] = field(default=None, repr=False, compare=False)
    s_genus: Optional[GenusTag] = field(default=None, repr=False, compare=False)
    problems: Tuple[str, ...] = ()

    @property
    def invariant(self) -> Optional[PrimitiveSublattice]:
        return self.involution.invariant if self.involution else None


def _tag(text: str) -> GenusTag:
    return GenusTag.of(make_standard(text))


def _rank1_candidates(n: int) -> List[FamilyCandidate]:
    N = n - 1
    candidates = [
        FamilyCandidate(
            "t2-div1", 1, -1, "<2>", f"2*U + 2*E8 + <{-2 * N}> + <-2>", True,
            _tag("<2>"), _tag(f"2*U + 2*E8 + <{-2 * N}> + <-2>"),
            (ln_vector(e1=1, f1=1),),
        )
    ]
    if n % 4 == 0:
        block = Lattice(((-n // 2, N), (N, -2 * N)))
        s_lattice = direct_sum(make_standard("2*U + 2*E8"), block)
        candidates.append(FamilyCandidate(
            "t2-div2", 1, -1, "<2>", f"2*U + 2*E8 + [[{-n // 2},{N}],[{N},{-2 * N}]]", True,
            _tag("<2>"), GenusTag.of(s_lattice),
            (ln_vector(e1=2, f1=n // 2, g=1),),
        ))
    else:
        candidates.append(FamilyCandidate("t2-div2", 1, -1, "<2>", "-", False))

    c = _square_root_of_minus_one(N) if two_square_representations(N) else None
    if c is not None:
        candidates.append(FamilyCandidate(
            "t2n", 1, 1, f"<{2 * N}>", "2*U + 2*E8 + 2*<-2>", True,
            _tag(f"<{2 * N}>"), _tag("2*U + 2*E8 + 2*<-2>"),
            (ln_vector(e1=N, f1=c * c + 1, g=c),),
        ))
    else:
        candidates.append(FamilyCandidate("t2n", 1, 1, f"<{2 * N}>", "-", False))
    return candidates


def _rank2_plus_candidates(n: int) -> List[FamilyCandidate]:
    N = n - 1
    split_t = f"<2> + <{-2 * N}>"
    candidates = [
        FamilyCandidate(
            "split", 2, 1, split_t, "2*U + 2*E8 + <-2>", True,
            _tag(split_t), _tag("2*U + 2*E8 + <-2>"),
            (ln_vector(e1=1, f1=1), ln_vector(g=1)),
        ),
        FamilyCandidate(
            "split-u2", 2, 1, split_t, "U + U(2) + 2*E8 + <-2>", True,
            _tag(split_t), _tag("U + U(2) + 2*E8 + <-2>"),
            (ln_vector(e1=1, f1=1), ln_vector(f2=N, g=1)),
        ),
    ]
    if n == 2:
        candidates.append(FamilyCandidate(
            "hyperbolic-plus", 2, 1, "U", "2*U + 2*E8 + <-2>", True,
            _tag("U"), _tag("2*U + 2*E8 + <-2>"),
            (ln_vector(e1=1), ln_vector(f1=1)),
        ))
        candidates.append(FamilyCandidate(
            "u2-plus", 2, 1, "U(2)", "U + U(2) + 2*E8 + <-2>", True,
            _tag("U(2)"), _tag("U + U(2) + 2*E8 + <-2>"),
            (ln_vector(e1=1, e2=1), ln_vector(f1=1, f2=1)),
        ))
    return candidates


def _rank2_minus_candidates(n: int) -> List[FamilyCandidate]:
    N = n - 1
    plain_s = f"2*U + 2*E8 + <{-2 * N}>"
    a1a1_t = "<2> + <-2>"
    candidates = [
        FamilyCandidate(
            "hyperbolic", 2, -1, "U", plain_s, True,
            _tag("U"), _tag(plain_s),
            (ln_vector(e1=1), ln_vector(f1=1)),
        ),
        FamilyCandidate(
            "u2", 2, -1, "U(2)", f"U + U(2) + 2*E8 + <{-2 * N}>", True,
            _tag("U(2)"), _tag(f"U + U(2) + 2*E8 + <{-2 * N}>"),
            (ln_vector(e1=1, e2=1), ln_vector(f1=1, f2=1)),
        ),
        FamilyCandidate(
            "a1a1", 2, -1, a1a1_t, f"U + 2*E8 + <2> + <-2> + <{-2 * N}>", True,
            _tag(a1a1_t), _tag(f"U + 2*E8 + <2> + <-2> + <{-2 * N}>"),
            (ln_vector(e1=1, f1=1), ln_vector(e2=1, f2=-1)),
        ),
    ]
    if n % 2 == 1:
        candidates.append(FamilyCandidate(
            "u2-glued", 2, -1, "U(2)", plain_s, True,
            _tag("U(2)"), _tag(plain_s),
            (ln_vector(e1=2, f1=N // 2, g=1), ln_vector(f1=1)),
        ))
    if n % 4 in (0, 2):
        if n == 2:
            basis = (ln_vector(e1=1, f1=1), ln_vector(g=1))
        elif n % 4 == 0:
            basis = (ln_vector(e1=2, f1=n // 2, g=1), ln_vector(e2=1, f2=-1))
        else:
            basis = None
        candidates.append(FamilyCandidate(
            "a1a1-cyclic", 2, -1, a1a1_t, plain_s, True,
            _tag(a1a1_t), _tag(plain_s), basis,
        ))
    if n % 4 == 1:
        y = ln_vector(e1=2, f1=N // 2, g=1)
        w = ln_vector(f1=-1, e2=1, f2=-1)
        if n == 5:
            block = Lattice(((-2, 1, 0), (1, -2, 1), (0, 1, 2)))
            s_genus = GenusTag.of(direct_sum(make_standard("U + 2*E8"), block))
            s_display = "U + 2*E8 + [[-2,1,0],[1,-2,1],[0,1,2]]"
        else:
            form = FiniteQuadraticForm.cyclic(2 * N, Fraction(n - 2, 2 * N))
            s_genus = GenusTag(Signature(2, 19), form)
            s_display = f"sig (2,19), A = {form.describe()}"
        candidates.append(FamilyCandidate(
            "a1a1-odd", 2, -1, a1a1_t, s_display, True,
            _tag(a1a1_t), s_genus,
            (tuple(p - q for p, q in zip(y, w)), w),
        ))
    return candidates


def _embedding_route_matches(n: int, target: Lattice, expected: GenusTag, group_bound: int) -> bool:
    """Whether some embedding of <2(n-1)> into target has the expected complement genus."""
    for embedding in rank1_embedding_classes(n - 1, target, group_bound):
        if embedding.complement_signature == expected.signature and is_isomorphic(
            embedding.complement_form, expected.form, group_bound
        ):
            return True
    return False


def _verify(n: int, candidate: FamilyCandidate, group_bound: int) -> FamilyRecord:
    note = CITED_UNIQUENESS if n in VERIFIED_RANGE else OUTSIDE_RANGE
    base = dict(
        family_id=candidate.family_id, n=n, rank=candidate.rank, action=candidate.action,
        t_display=candidate.t_display, s_display=candidate.s_display, exists=candidate.exists,
        t_genus=candidate.t_genus, s_genus=candidate.s_genus,
    )
    if not candidate.exists:
        return FamilyRecord(**base)
    if candidate.basis is None:
        return FamilyRecord(**base, uniqueness_note=UNVERIFIED, dimension=21 - candidate.rank)

    ambient = k3n_lattice(n)
    T = PrimitiveSublattice(ambient, candidate.basis)
    S = orthogonal_complement(T)
    problems: List[str] = []
    involution = None
    case = None
    try:
        if not genus_match(T.lattice, candidate.t_genus, group_bound):
            problems.append("invariant genus")
        if not genus_match(S.lattice, candidate.s_genus, group_bound):
            problems.append("coinvariant genus")
        involution = extend_reflection(ambient, S)
        # on A_L = Z/2 the two actions coincide
        if n != 2 and involution.discriminant_action != candidate.action:
            problems.append(f"discriminant action {involution.discriminant_action:+d}")
        two_elementary_side(involution)
        case = classify_discriminant_case(n, T.lattice.discriminant_form, S.lattice.discriminant_form)
        if candidate.action == -1:
            route = _embedding_route_matches(n, orthogonal_in_mukai(T).lattice, candidate.s_genus, group_bound)
        else:
            route = _embedding_route_matches(n, orthogonal_in_mukai(S).lattice, candidate.t_genus, group_bound)
        if not route:
            problems.append("embedding route")
    except LatticeError as e:
        problems.append(str(e))
    if problems:
        logger.warning("family %s for n = %d failed verification: %s",
                       candidate.family_id, n, "; ".join(problems))
    return FamilyRecord(
        **base, involution=involution, case=case, verified=not problems,
        uniqueness_note=note, dimension=family_dimension(T), problems=tuple(problems),
    )


@lru_cache(maxsize=64)
def _classified(n: int, rank: int, action: int, group_bound: int) -> Tuple[FamilyRecord, ...]:
    k3n_lattice(n)
    if rank == 1:
        candidates = _rank1_candidates(n)
    elif action == 1:
        candidates = _rank2_plus_candidates(n)
    else:
        candidates = _rank2_minus_candidates(n)
    return tuple(_verify(n, c, group_bound) for c in candidates)


def classify_rank1(n: int, group_bound: int = DEFAULT_GROUP_BOUND) -> List[FamilyRecord]:
    """The three rank-one families, each flagged as existing or not."""
    return list(_classified(n, 1, 0, group_bound))


def classify_rank2(n: int, action: int, group_bound: int = DEFAULT_GROUP_BOUND) -> List[FamilyRecord]:
    """Rank-two families acting on A_L by the given sign."""
    if action not in (1, -1):
        raise UnknownFamilyError(f"action must be +1 or -1, got {action}")
    return list(_classified(n, 2, action, group_bound))


def find_family(n: int, family_id: str, group_bound: int = DEFAULT_GROUP_BOUND) -> FamilyRecord:
    records = classify_rank1(n, group_bound)
    records += classify_rank2(n, -1, group_bound) + classify_rank2(n, 1, group_bound)
    for record in records:
        if record.family_id == family_id and record.exists:
            return record
    raise UnknownFamilyError(f"no family {family_id!r} for n = {n}")


# ---------------------------------------------------------------------------
# Families of maximal dimension


@dataclass(frozen=True)
class ModuliFamily:
    record: FamilyRecord
    dimension: int
    components: Optional[int]
    component_bounds: Tuple[int, int]
    chambers: ChamberReport


def _same_genus(a: FamilyRecord, b: FamilyRecord, group_bound: int) -> bool:
    if None in (a.t_genus, a.s_genus, b.t_genus, b.s_genus):
        return False
    return (
        a.t_genus.signature == b.t_genus.signature
        and a.s_genus.signature == b.s_genus.signature
        and is_isomorphic(a.t_genus.form, b.t_genus.form, group_bound)
        and is_isomorphic(a.s_genus.form, b.s_genus.form, group_bound)
    )


def contains_fingerprint(T: PrimitiveSublattice, fingerprints: Sequence[Tuple[int, int]], box: int) -> bool:
    """
    Whether T has a primitive vector with one of the (square, divisibility) pairs.

    This is a witness search over coordinates in [-box, box]: True is certain,
    False only says no witness lies in the box. Callers take the box from
    search.containment_box.
    """
    (a, b), (_, c) = T.gram
    pairings = np.array(mat_mul(T.basis, T.ambient.gram), dtype=np.int64)
    axis = np.arange(-box, box + 1, dtype=np.int64)
    xs, ys = (grid.ravel() for grid in np.meshgrid(axis, axis, indexing="ij"))
    primitive = np.gcd(xs, ys) == 1
    squares = a * xs * xs + 2 * b * xs * ys + c * ys * ys
    images = xs[:, None] * pairings[0] + ys[:, None] * pairings[1]
    divs = np.gcd.reduce(np.abs(images), axis=1)
    for square, div in fingerprints:
        if np.any(primitive & (squares == square) & (divs == div)):
            return True
    return False


def maximal_families(n: int, containment_box: int = 12, bound: Optional[int] = None,
                     doubling_check: bool = True,
                     group_bound: int = DEFAULT_GROUP_BOUND) -> List[ModuliFamily]:
    """
    Families of dimension 21 - rk T not contained in the closure of a larger
    one, with their component counts.

    bound and doubling_check are passed to the wall search in each rank-two T.
    """
    records = [r for r in classify_rank1(n, group_bound) if r.exists]
    records += classify_rank2(n, -1, group_bound) + classify_rank2(n, 1, group_bound)
    distinct: List[FamilyRecord] = []
    for record in records:
        if not any(_same_genus(record, kept, group_bound) for kept in distinct):
            distinct.append(record)

    fingerprints = list(rank1_fingerprints(n))
    pairs = wall_pairs(n)
    families = []
    for record in distinct:
        T = record.invariant
        if record.rank == 2 and T is not None and contains_fingerprint(T, fingerprints, containment_box):
            logger.debug("family %s specializes a rank-one family", record.family_id)
            continue
        if T is None:
            families.append(ModuliFamily(record, record.dimension, None, (1, 1), None))
            continue
        if record.rank == 2:
            search = walls_in_T(T, pairs, bound, doubling_check)
            report = count_chambers(T, search.walls, search.exhaustive)
        else:
            report = count_chambers(T, [])
        families.append(ModuliFamily(record, record.dimension, report.orbits, report.orbit_bounds, report))
    return families
