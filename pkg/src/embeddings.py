"""
Primitive embeddings of rank-one lattices, short vector search, and the
embedding of L[n] into the Mukai lattice.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import floor, gcd
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    AmbientMismatchError,
    DegenerateLatticeError,
    EnumerationBoundError,
    OddLatticeError,
    SignatureObstructionError,
)
from .finite_forms import (
    DEFAULT_GROUP_BOUND,
    FiniteQuadraticForm,
    Subgroup,
    is_isomorphic,
    milgram_signature,
    perp_mod_H,
)
from .integer_matrix import Row, mat_mul
from .lattice import (
    Lattice,
    PrimitiveSublattice,
    Signature,
    Sublattice,
    k3n_lattice,
    mukai_lattice,
    orthogonal_complement,
    rank_one,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GenusTag:
    """Signature and discriminant form of an even lattice."""

    signature: Signature
    form: FiniteQuadraticForm

    def __post_init__(self):
        residue = milgram_signature(self.form)
        if residue != self.signature.value % 8:
            raise SignatureObstructionError(
                f"signature {self.signature} is incompatible with {self.form.describe()} "
                f"(Gauss sum residue {residue})"
            )

    @classmethod
    def of(cls, lattice: Lattice) -> "GenusTag":
        return cls(lattice.signature, lattice.discriminant_form)

    @classmethod
    def from_expression(cls, text: str) -> "GenusTag":
        from .expression_parser import build_lattice, parse_lattice

        return cls.of(build_lattice(parse_lattice(text)))

    def describe(self) -> str:
        return f"sig {self.signature}, A = {self.form.describe()}"


def genus_match(lattice: Lattice, tag: GenusTag, group_bound: int = DEFAULT_GROUP_BOUND) -> bool:
    return lattice.signature == tag.signature and is_isomorphic(lattice.discriminant_form, tag.form, group_bound)


@dataclass(frozen=True)
class Rank1EmbeddingClass:
    """A primitive embedding of <2k> into a target, up to the complement genus."""

    source_square: int
    target: Lattice
    subgroup_order: int
    generator: Tuple[int, ...]
    image: Tuple[int, ...]
    complement_signature: Signature
    complement_form: FiniteQuadraticForm

    @property
    def genus(self) -> GenusTag:
        return GenusTag(self.complement_signature, self.complement_form)


def _complement_is_realizable(rank: int, signature: Signature, form: FiniteQuadraticForm) -> bool:
    if form.length > rank:
        return False
    if milgram_signature(form) != signature.value % 8:
        return False
    if rank == 0:
        return form.is_trivial()
    if rank == 1:
        value = form.size if signature.positive else -form.size
        try:
            candidate = rank_one(value)
        except OddLatticeError:
            return False
        return is_isomorphic(candidate.discriminant_form, form)
    return True


def rank1_embedding_classes(k: int, target: Lattice,
                            group_bound: int = DEFAULT_GROUP_BOUND) -> List[Rank1EmbeddingClass]:
    """
    Classes of primitive embeddings <2k> -> target, one per subgroup order and
    complement discriminant form.
    """
    if k == 0:
        raise DegenerateLatticeError("<0> is degenerate")
    sig = target.signature
    if (k > 0 and sig.positive == 0) or (k < 0 and sig.negative == 0):
        raise SignatureObstructionError(f"<{2 * k}> does not embed into a lattice of signature {sig}")
    complement_signature = Signature(sig.positive - (k > 0), sig.negative - (k < 0))
    complement_rank = target.rank - 1

    order = 2 * abs(k)
    source = FiniteQuadraticForm.cyclic(order, Fraction(1, 2 * k))
    target_form = target.discriminant_form
    if source.size * target_form.size > group_bound:
        raise EnumerationBoundError(
            f"glue search over a group of order {source.size * target_form.size} exceeds {group_bound}"
        )
    total = source.scaled(-1).direct_sum(target_form)

    classes: List[Rank1EmbeddingClass] = []
    for d in sorted(d for d in range(1, order + 1) if order % d == 0):
        h = (order // d,)
        wanted = source.q(h)
        for y in target_form.elements():
            if target_form.element_order(y) != d or target_form.q(y) != wanted:
                continue
            graph = Subgroup.generated_by(total, [h + y])
            form = perp_mod_H(total, graph, group_bound)
            if not _complement_is_realizable(complement_rank, complement_signature, form):
                logger.debug("skipping glue %s -> %s: complement %s not realizable", h, y, form.describe())
                continue
            if any(c.subgroup_order == d and is_isomorphic(c.complement_form, form) for c in classes):
                continue
            classes.append(Rank1EmbeddingClass(2 * k, target, d, h, y, complement_signature, form))
    logger.debug("<%d> -> %s: %d embedding classes", 2 * k, target, len(classes))
    return classes


# ---------------------------------------------------------------------------
# Vector search


class VectorSearchResult(NamedTuple):
    vectors: List[Row]
    exhaustive: bool


def _normalize_sign(vector: Sequence[int]) -> Row:
    for x in vector:
        if x:
            return tuple(vector) if x > 0 else tuple(-c for c in vector)
    return tuple(vector)


def _is_primitive(vector: Sequence[int]) -> bool:
    result = 0
    for x in vector:
        result = gcd(result, int(x))
    return result == 1


def _fincke_pohst_coefficients(gram: Sequence[Sequence[int]]) -> List[List[Fraction]]:
    size = len(gram)
    q = [[Fraction(x) for x in row] for row in gram]
    for i in range(size):
        for j in range(i + 1, size):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, size):
            for l in range(k, size):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def _definite_vectors(gram: Sequence[Sequence[int]], target: int) -> List[Row]:
    """All vectors of a positive definite form with value exactly target."""
    size = len(gram)
    q = _fincke_pohst_coefficients(gram)
    x = [0] * size
    found = []

    def search(i: int, remaining: Fraction):
        if i < 0:
            if remaining == 0:
                found.append(tuple(x))
            return
        center = -sum((q[i][j] * x[j] for j in range(i + 1, size)), Fraction(0))
        start = floor(center)
        for value, step in ((start, -1), (start + 1, 1)):
            while True:
                cost = q[i][i] * (value - center) ** 2
                if cost > remaining:
                    break
                x[i] = value
                search(i - 1, remaining - cost)
                value += step
        x[i] = 0

    search(size - 1, Fraction(target))
    return found


def _box_vectors(lattice: Lattice, target: int, bound: int) -> List[Row]:
    gram = np.array(lattice.gram, dtype=np.int64)
    axis = np.arange(-bound, bound + 1, dtype=np.int64)
    grid = np.array(np.meshgrid(*([axis] * lattice.rank), indexing="ij")).reshape(lattice.rank, -1).T
    squares = np.einsum("ij,jk,ik->i", grid, gram, grid)
    hits = grid[squares == target]
    return [tuple(int(c) for c in row) for row in hits]


def vectors_of_square(lattice: Lattice, m: int, bound: Optional[int] = None) -> VectorSearchResult:
    """
    Primitive vectors of square m, up to sign, sorted. Exhaustive for definite
    lattices; indefinite lattices need a coordinate box and the result is
    marked non-exhaustive.
    """
    sig = lattice.signature
    if sig.negative == 0 or sig.positive == 0:
        sign = 1 if sig.negative == 0 else -1
        if m == 0 or (m > 0) != (sign > 0):
            return VectorSearchResult([], True)
        gram = [[sign * x for x in row] for row in lattice.gram]
        raw = _definite_vectors(gram, sign * m)
        exhaustive = True
    else:
        if bound is None:
            raise EnumerationBoundError("an indefinite lattice needs an explicit search box")
        raw = _box_vectors(lattice, m, bound)
        exhaustive = False
    vectors = sorted({_normalize_sign(v) for v in raw if any(v) and _is_primitive(v)})
    logger.debug("vectors of square %d in %s: %d (exhaustive=%s)", m, lattice, len(vectors), exhaustive)
    return VectorSearchResult(vectors, exhaustive)


# ---------------------------------------------------------------------------
# L[n] inside the Mukai lattice


class MukaiEmbedding(NamedTuple):
    sublattice: PrimitiveSublattice
    generator: Row


def _embedding_rows(n: int) -> List[Row]:
    """Images of the L[n] basis vectors in M."""
    rows = []
    for i in range(22):
        target = i if i < 6 else i + 2
        rows.append(tuple(1 if j == target else 0 for j in range(24)))
    g = [0] * 24
    g[6], g[7] = 1, -(n - 1)
    rows.append(tuple(g))
    return rows


def embed_Ln_in_mukai(n: int) -> MukaiEmbedding:
    """
    L[n] -> M: the three copies of U and both E8 go to themselves and
    g -> e4 - (n-1) f4. The complement is spanned by v = e4 + (n-1) f4.
    """
    mukai = mukai_lattice()
    rows = _embedding_rows(n)
    sub = PrimitiveSublattice(mukai, tuple(rows))
    if sub.lattice != k3n_lattice(n):
        raise AmbientMismatchError("image of L[n] has the wrong Gram matrix")
    v = [0] * 24
    v[6], v[7] = 1, n - 1
    return MukaiEmbedding(sub, tuple(v))


def ln_index(ambient: Lattice) -> int:
    """n for an ambient lattice equal to L[n]."""
    if ambient.rank != 23 or ambient.gram[22][22] >= 0:
        raise AmbientMismatchError("ambient lattice is not L[n]")
    n = 1 - ambient.gram[22][22] // 2
    if ambient != k3n_lattice(n):
        raise AmbientMismatchError("ambient lattice is not L[n]")
    return n


def compose_in_mukai(sub: Sublattice) -> PrimitiveSublattice:
    """Push a sublattice of L[n] into M; raises if it stops being primitive."""
    n = ln_index(sub.ambient)
    rows = mat_mul(sub.basis, _embedding_rows(n)) if sub.basis else []
    return PrimitiveSublattice(mukai_lattice(), tuple(rows))


def orthogonal_in_mukai(sub: Sublattice) -> PrimitiveSublattice:
    return orthogonal_complement(compose_in_mukai(sub))

