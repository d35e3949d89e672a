"""
Intersection lattice of a central arrangement
Möbius values, characteristic and Poincaré polynomials, region counts
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Set, Tuple

import sympy
from sympy import Poly

from ..exceptions import InvalidInputError, ResourceLimitError
from ..utils.exact import Subspace, intersect
from ..utils.permutations import Permutation
from .arrangements import HyperplaneSet

logger = logging.getLogger(__name__)

SUBSET_CLOSURE_LIMIT = 16

_q = sympy.Symbol("q")


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients[i] is the coefficient of x^i"""

    coefficients: Tuple[int, ...]

    def __post_init__(self):
        coeffs = list(self.coefficients)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(int(c) for c in coeffs) or (0,))

    @classmethod
    def monomial(cls, degree: int, coefficient: int = 1) -> "IntPolynomial":
        return cls((0,) * degree + (coefficient,))

    @property
    def degree(self) -> int:
        if self.coefficients == (0,):
            return -1
        return len(self.coefficients) - 1

    def __getitem__(self, i: int) -> int:
        return self.coefficients[i] if 0 <= i < len(self.coefficients) else 0

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        n = max(len(self.coefficients), len(other.coefficients))
        return IntPolynomial(tuple(self[i] + other[i] for i in range(n)))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        n = max(len(self.coefficients), len(other.coefficients))
        return IntPolynomial(tuple(self[i] - other[i] for i in range(n)))

    def __call__(self, x: int) -> int:
        return sum(c * x**i for i, c in enumerate(self.coefficients))

    def to_poly(self, symbol=_q) -> Poly:
        return Poly(list(reversed(self.coefficients)), symbol, domain="ZZ")

    def factored(self, symbol=_q) -> str:
        """sympy factorization, e.g. "q*(q - 2)*(q - 1)" """
        return str(sympy.factor(self.to_poly(symbol).as_expr()))

    def __str__(self) -> str:
        return str(self.to_poly().as_expr())


@dataclass
class LatticeNode:
    subspace: Subspace
    rank: int
    mu: int
    mask: int  # bit j set when hyperplane j contains the subspace


@dataclass
class IntersectionLattice:
    """
    Flats of an arrangement ordered by reverse inclusion

    nodes[0] is the ambient space; covers[i] lists the nodes of rank
    nodes[i].rank + 1 lying inside nodes[i].
    """

    ambient_dim: int
    hyperplane_count: int
    nodes: List[LatticeNode]
    covers: List[List[int]]
    _by_subspace: Dict[Subspace, int] = field(default_factory=dict, repr=False)
    _by_mask: Dict[int, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._by_subspace = {n.subspace: i for i, n in enumerate(self.nodes)}
        self._by_mask = {n.mask: i for i, n in enumerate(self.nodes)}

    @property
    def rank(self) -> int:
        return max(n.rank for n in self.nodes)

    def index_of(self, subspace: Subspace) -> Optional[int]:
        return self._by_subspace.get(subspace)

    def index_of_mask(self, mask: int) -> Optional[int]:
        return self._by_mask.get(mask)

    def nodes_of_rank(self, r: int) -> List[int]:
        return [i for i, n in enumerate(self.nodes) if n.rank == r]

    def rank_counts(self) -> List[int]:
        counts = [0] * (self.rank + 1)
        for n in self.nodes:
            counts[n.rank] += 1
        return counts


def check_size(h: HyperplaneSet, max_hyperplanes: Optional[int], force: bool):
    """Refuse arrangements above the hyperplane limit unless forced"""
    if max_hyperplanes is not None and len(h) > max_hyperplanes and not force:
        raise ResourceLimitError(
            f"{len(h)} hyperplanes exceeds the limit of {max_hyperplanes} (use --force to override)"
        )


def build_lattice(
    h: HyperplaneSet, max_hyperplanes: Optional[int] = None, force: bool = False
) -> IntersectionLattice:
    """
    Build the intersection lattice level by level

    Args:
        h: Hyperplane set
        max_hyperplanes: Refuse larger inputs unless force is set
        force: Override the size guard

    Returns:
        IntersectionLattice with Möbius values
    """
    check_size(h, max_hyperplanes, force)
    normals = h.normals
    full = (1 << len(h)) - 1

    def mask_of(subspace: Subspace) -> int:
        m = 0
        for j, n in enumerate(normals):
            if subspace.contains_normal(n):
                m |= 1 << j
        return m

    ambient = Subspace.ambient(h.k)
    nodes = [LatticeNode(ambient, 0, 1, 0)]
    covers: List[List[int]] = [[]]
    by_subspace = {ambient: 0}
    level = [0]

    while level:
        next_level = []
        for i in level:
            x = nodes[i]
            seen = x.mask
            for j in range(len(h)):
                if seen >> j & 1:
                    continue
                y = intersect(x.subspace, Subspace.from_normals([normals[j]], h.k))
                idx = by_subspace.get(y)
                if idx is None:
                    idx = len(nodes)
                    nodes.append(LatticeNode(y, y.codim, 0, mask_of(y)))
                    covers.append([])
                    by_subspace[y] = idx
                    next_level.append(idx)
                seen |= nodes[idx].mask
                covers[i].append(idx)
                if seen == full:
                    break
        level = next_level
        if level:
            logger.debug(f"Lattice rank {nodes[level[0]].rank}: {len(level)} flats")

    for i in range(1, len(nodes)):
        mi = nodes[i].mask
        nodes[i].mu = -sum(
            nodes[j].mu
            for j in range(len(nodes))
            if nodes[j].rank < nodes[i].rank and nodes[j].mask & mi == nodes[j].mask
        )

    for c in covers:
        c.sort()
    lattice = IntersectionLattice(h.k, len(h), nodes, covers)
    logger.info(f"✅ Built lattice: {len(nodes)} flats, rank {lattice.rank}")
    return lattice


def characteristic_polynomial(lattice: IntersectionLattice, ambient_dim: Optional[int] = None) -> IntPolynomial:
    """χ(A,q) = Σ_X μ(X) q^dim X"""
    n = lattice.ambient_dim if ambient_dim is None else ambient_dim
    result = IntPolynomial((0,))
    for node in lattice.nodes:
        result = result + IntPolynomial.monomial(n - node.rank, node.mu)
    return result


def poincare_polynomial(lattice: IntersectionLattice) -> IntPolynomial:
    """π(A,t) = Σ_X |μ(X)| t^rank X"""
    coeffs = [0] * (lattice.rank + 1)
    for node in lattice.nodes:
        coeffs[node.rank] += abs(node.mu)
    return IntPolynomial(tuple(coeffs))


def region_count(lattice: IntersectionLattice) -> int:
    """Chambers of the real arrangement (Zaslavsky)"""
    return sum(abs(node.mu) for node in lattice.nodes)


def deletion_restriction_charpoly(h: HyperplaneSet) -> IntPolynomial:
    """
    Characteristic polynomial by χ(A) = χ(A - H) - χ(A^H)

    Independent of build_lattice. A state (X, m) stands for the
    arrangement {X ∩ H_j : j < m, X ⊄ H_j} inside the subspace X; each
    restricted hyperplane is represented by the least j producing it.

    Args:
        h: Hyperplane set

    Returns:
        IntPolynomial in q
    """
    normals = h.normals
    meets: Dict[Tuple[Subspace, int], Subspace] = {}
    reps: Dict[Subspace, List[Optional[int]]] = {}
    memo: Dict[Tuple[Subspace, int], IntPolynomial] = {}

    def meet(x: Subspace, j: int) -> Subspace:
        key = (x, j)
        if key not in meets:
            meets[key] = intersect(x, Subspace.from_normals([normals[j]], h.k))
        return meets[key]

    def representatives(x: Subspace) -> List[Optional[int]]:
        if x not in reps:
            first: Dict[Subspace, int] = {}
            out: List[Optional[int]] = []
            for j, n in enumerate(normals):
                if x.contains_normal(n):
                    out.append(None)
                    continue
                out.append(first.setdefault(meet(x, j), j))
            reps[x] = out
        return reps[x]

    def chi(x: Subspace, m: int) -> IntPolynomial:
        key = (x, m)
        if key in memo:
            return memo[key]
        live = [r for r in representatives(x)[:m] if r is not None]
        if not live:
            result = IntPolynomial.monomial(x.dim)
        else:
            top = max(live)
            result = chi(x, top) - chi(meet(x, top), m)
        memo[key] = result
        return result

    return chi(Subspace.ambient(h.k), len(h))


def subset_closure(h: HyperplaneSet) -> Set[Subspace]:
    """
    Every intersection of a subset of hyperplanes (oracle for small inputs)

    Args:
        h: At most 16 hyperplanes

    Returns:
        Set of canonical subspaces, the ambient space included
    """
    if len(h) > SUBSET_CLOSURE_LIMIT:
        raise ResourceLimitError(f"Subset closure is limited to {SUBSET_CLOSURE_LIMIT} hyperplanes")
    flats = set()
    for size in range(len(h) + 1):
        for subset in combinations(range(len(h)), size):
            flats.add(h.subspace(subset))
    return flats


def permute_node(lattice: IntersectionLattice, node: int, g: Permutation) -> int:
    """Index of the flat g·X"""
    image = lattice.nodes[node].subspace.permuted(g.images)
    idx = lattice.index_of(image)
    if idx is None:
        raise InvalidInputError("Permuted flat is not in the lattice; arrangement is not Σ_k-stable")
    return idx


def lattice_to_json(lattice: IntersectionLattice) -> dict:
    return {
        "ambient_dim": lattice.ambient_dim,
        "hyperplane_count": lattice.hyperplane_count,
        "nodes": [
            {"subspace": n.subspace.to_json(), "rank": n.rank, "mu": n.mu, "mask": n.mask}
            for n in lattice.nodes
        ],
        "covers": lattice.covers,
    }


def lattice_from_json(data: dict) -> IntersectionLattice:
    nodes = [
        LatticeNode(Subspace.from_json(n["subspace"]), int(n["rank"]), int(n["mu"]), int(n["mask"]))
        for n in data["nodes"]
    ]
    covers = [[int(i) for i in c] for c in data["covers"]]
    return IntersectionLattice(int(data["ambient_dim"]), int(data["hyperplane_count"]), nodes, covers)
