"""
Center-of-mass hyperplane arrangements
Builds M(t,k), M'(t,k) and the braid arrangement as canonical normal sets
"""

import logging
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field, model_validator

from ..utils.exact import Subspace, rat_matrix, rref
from ..exceptions import InvalidInputError
from ..utils.permutations import Permutation

logger = logging.getLogger(__name__)


class Family(str, Enum):
    M = "M"
    MPRIME = "Mprime"
    BRAID = "Braid"


class ArrangementSpec(BaseModel):
    """Which arrangement to build; t is ignored for the braid family"""

    family: Family
    t: int = Field(1, ge=0)
    k: int = Field(..., ge=0)

    @model_validator(mode="after")
    def _check_t(self):
        if self.family != Family.BRAID and self.t < 1:
            raise ValueError(f"t must be >= 1 for family {self.family.value}")
        return self


def hyperplane_order_key(normal: Sequence[int]) -> tuple:
    """Nonzero entries sort before zeros, larger before smaller"""
    return tuple((x == 0, -x) for x in normal)


@dataclass(frozen=True)
class Hyperplane:
    """Central hyperplane given by a primitive integer normal"""

    normal: Tuple[int, ...]

    @classmethod
    def canonical(cls, normal: Sequence[int]) -> "Hyperplane":
        """
        Scale a nonzero integer normal to the canonical representative

        Args:
            normal: Integer vector

        Returns:
            Hyperplane with gcd 1 and first nonzero entry positive
        """
        normal = [int(x) for x in normal]
        g = 0
        for x in normal:
            g = gcd(g, x)
        if g == 0:
            raise InvalidInputError("Zero normal does not define a hyperplane")
        first = next(x for x in normal if x != 0)
        if first < 0:
            g = -g
        return cls(tuple(x // g for x in normal))

    @property
    def dim(self) -> int:
        return len(self.normal)

    def label(self) -> str:
        """Human label such as "x1+x4-x2-x3" """
        plus = "+".join(f"x{i + 1}" for i, x in enumerate(self.normal) if x == 1)
        minus = "".join(f"-x{i + 1}" for i, x in enumerate(self.normal) if x == -1)
        if any(abs(x) > 1 for x in self.normal):
            return str(list(self.normal))
        return plus + minus

    def permuted(self, g: Permutation) -> Tuple["Hyperplane", int]:
        """
        Image under a coordinate permutation

        Returns:
            (canonical image, sign relating the permuted normal to it)
        """
        image = g.apply_to_vector(self.normal)
        canon = Hyperplane.canonical(image)
        sign = 1 if tuple(image) == canon.normal else -1
        return canon, sign


@dataclass(frozen=True)
class HyperplaneSet:
    """
    Hyperplanes in QQ^k in a fixed order

    Generated sets are sorted by hyperplane_order_key; essentialized sets
    keep the indexing of the set they came from.
    """

    k: int
    hyperplanes: Tuple[Hyperplane, ...]

    @classmethod
    def from_normals(cls, k: int, normals: Sequence[Sequence[int]]) -> "HyperplaneSet":
        """Canonicalize, deduplicate and sort"""
        unique = {}
        for n in normals:
            if len(n) != k:
                raise InvalidInputError(f"Normal {list(n)} does not have length {k}")
            h = Hyperplane.canonical(n)
            unique[h.normal] = h
        ordered = sorted(unique.values(), key=lambda h: hyperplane_order_key(h.normal))
        return cls(k, tuple(ordered))

    def __len__(self) -> int:
        return len(self.hyperplanes)

    def __iter__(self):
        return iter(self.hyperplanes)

    @property
    def normals(self) -> List[Tuple[int, ...]]:
        return [h.normal for h in self.hyperplanes]

    def index_of(self) -> Dict[Tuple[int, ...], int]:
        return {h.normal: i for i, h in enumerate(self.hyperplanes)}

    def is_subset_of(self, other: "HyperplaneSet") -> bool:
        if self.k != other.k:
            return False
        return set(self.normals) <= set(other.normals)

    def subspace(self, indices: Sequence[int]) -> Subspace:
        """Intersection of the listed hyperplanes"""
        return Subspace.from_normals([self.hyperplanes[i].normal for i in indices], self.k)

    def permutation_action(self, g: Permutation) -> List[Tuple[int, int]]:
        """
        How g permutes the hyperplanes

        Args:
            g: Permutation of the k coordinates

        Returns:
            For each index j, (index of g·H_j, sign of the permuted normal)
        """
        lookup = self.index_of()
        action = []
        for h in self.hyperplanes:
            image, sign = h.permuted(g)
            if image.normal not in lookup:
                raise InvalidInputError(
                    f"Arrangement is not Σ_{self.k}-stable: {h.label()} maps outside the set"
                )
            action.append((lookup[image.normal], sign))
        return action


def _sum_forms(t: int, k: int) -> List[Tuple[int, ...]]:
    """Normals Σ_I x - Σ_J x over unordered pairs of distinct t-subsets"""
    subsets = list(combinations(range(k), t))
    forms = []
    for a, b in combinations(subsets, 2):
        normal = [0] * k
        for i in a:
            normal[i] += 1
        for j in b:
            normal[j] -= 1
        forms.append(tuple(normal))
    return forms


def braid_normals(k: int) -> List[Tuple[int, ...]]:
    return _sum_forms(1, k)


def build(spec: ArrangementSpec) -> HyperplaneSet:
    """
    Build the hyperplane set of an arrangement family

    Args:
        spec: Family, t and k

    Returns:
        Canonical, deduplicated, sorted HyperplaneSet
    """
    k = spec.k
    if k == 0:
        return HyperplaneSet(0, ())

    if spec.family == Family.BRAID or (spec.family == Family.M and spec.t >= k):
        normals = braid_normals(k)
    elif spec.family == Family.M:
        normals = _sum_forms(spec.t, k)
    else:
        normals = []
        for s in range(1, spec.t + 1):
            normals.extend(braid_normals(k) if s >= k else _sum_forms(s, k))

    result = HyperplaneSet.from_normals(k, normals)
    logger.debug(f"Built {spec.family.value}(t={spec.t}, k={k}): {len(result)} hyperplanes")
    return result


def essentialize(h: HyperplaneSet) -> Tuple[HyperplaneSet, int, int]:
    """
    Rewrite the arrangement in coordinates on the span of its normals

    Args:
        h: Hyperplane set in QQ^k

    Returns:
        (set in QQ^rank with the same indexing, rank, lineality dimension)
    """
    if not h.hyperplanes:
        return HyperplaneSet(0, ()), 0, h.k

    basis, rank = rref(rat_matrix(h.normals, h.k))
    pivots = []
    for row in basis.to_list()[:rank]:
        pivots.append(next(j for j, x in enumerate(row) if x != 0))

    essential = tuple(Hyperplane.canonical([n[p] for p in pivots]) for n in h.normals)
    return HyperplaneSet(rank, essential), rank, h.k - rank


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int):
        a, b = self.find(i), self.find(j)
        if a != b:
            self.parent[max(a, b)] = min(a, b)


def hyperplane_orbits(h: HyperplaneSet) -> List[List[int]]:
    """
    Orbits of the coordinate-permutation action on hyperplanes

    Args:
        h: Σ_k-stable hyperplane set

    Returns:
        Blocks of hyperplane indices, each sorted, blocks ordered by first index
    """
    uf = _UnionFind(len(h))
    for g in Permutation.generators(h.k):
        for j, (image, _) in enumerate(h.permutation_action(g)):
            uf.union(j, image)

    blocks: Dict[int, List[int]] = {}
    for j in range(len(h)):
        blocks.setdefault(uf.find(j), []).append(j)
    return [blocks[root] for root in sorted(blocks)]


def is_stable(h: HyperplaneSet) -> bool:
    """True when every coordinate permutation maps the set to itself"""
    try:
        for g in Permutation.generators(h.k):
            h.permutation_action(g)
    except InvalidInputError:
        return False
    return True


def inclusion_chain(t: int, k: int) -> Tuple[HyperplaneSet, HyperplaneSet, HyperplaneSet]:
    """
    Hyperplane sets of M'(t,k) ⊇ M(t,k) ⊇ Braid(k)

    The complements include the other way round:
    M'(t,k) ⊂ M(t,k) ⊂ Conf(C,k).
    """
    mprime = build(ArrangementSpec(family=Family.MPRIME, t=t, k=k))
    m = build(ArrangementSpec(family=Family.M, t=t, k=k))
    braid = build(ArrangementSpec(family=Family.BRAID, k=k))
    if not braid.is_subset_of(m):
        raise InvalidInputError(f"Braid({k}) is not contained in M({t},{k})")
    if not m.is_subset_of(mprime):
        raise InvalidInputError(f"M({t},{k}) is not contained in M'({t},{k})")
    return mprime, m, braid


def spec_for(family: str, t: Optional[int], k: int) -> ArrangementSpec:
    """Validate loose CLI/file values into an ArrangementSpec; t is required for M and Mprime"""
    if t is None and family in (Family.M, Family.MPRIME):
        raise InvalidInputError("Families M and Mprime need t")
    try:
        return ArrangementSpec(family=family, t=t if t is not None else 1, k=k)
    except ValueError as e:
        raise InvalidInputError(f"Invalid arrangement parameters: {e}") from e
