"""
Orlik-Solomon algebra in the no-broken-circuit basis
Straightening, the Σ_k action, characters and isotypic dimensions
"""

import logging
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from joblib import Parallel, delayed
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from ..exceptions import InvalidInputError
from ..utils.exact import field_rank, rat_matrix, rref
from ..utils.permutations import Permutation, conjugacy_classes, sort_with_sign
from .arrangements import HyperplaneSet
from .lattice import IntersectionLattice, build_lattice

logger = logging.getLogger(__name__)

# Strictly increasing hyperplane indices
NbcMonomial = Tuple[int, ...]

REPRESENTATIONS = ("trivial", "sign")


class OsElement(dict):
    """Integer combination {monomial: coefficient} of equal-degree monomials"""

    def add_term(self, monomial: NbcMonomial, coefficient: int):
        value = self.get(monomial, 0) + coefficient
        if value:
            self[monomial] = value
        else:
            self.pop(monomial, None)

    def scaled(self, factor: int) -> "OsElement":
        return OsElement({m: c * factor for m, c in self.items()} if factor else {})

    def __iadd__(self, other):
        for m, c in other.items():
            self.add_term(m, c)
        return self


def rep_value(rep: str, g: Permutation) -> int:
    if rep == "trivial":
        return 1
    if rep == "sign":
        return g.sign
    raise InvalidInputError(f"Unknown representation: {rep}")


class OrlikSolomonAlgebra:
    """
    OS algebra of a central arrangement

    Generators e_j follow the hyperplane order of the set, which is the
    order used for broken circuits.
    """

    def __init__(self, h: HyperplaneSet, lattice: Optional[IntersectionLattice] = None):
        """
        Args:
            h: Hyperplane set
            lattice: Its intersection lattice (built when omitted)
        """
        self.h = h
        self.lattice = lattice if lattice is not None else build_lattice(h)
        self._closure: Dict[Tuple[int, ...], Optional[int]] = {}
        self._straight: Dict[Tuple[int, ...], OsElement] = {}
        self._basis: Dict[int, List[NbcMonomial]] = {0: [()]}
        self._action: Dict[Permutation, List[int]] = {}

    @property
    def rank(self) -> int:
        return self.lattice.rank if len(self.h) else 0

    def _flat_mask(self, indices: Tuple[int, ...]) -> Optional[int]:
        """Hyperplanes containing ∩ indices, or None when the set is dependent"""
        if indices not in self._closure:
            subspace = self.h.subspace(indices)
            if subspace.codim < len(indices):
                self._closure[indices] = None
            else:
                self._closure[indices] = self.lattice.nodes[self.lattice.index_of(subspace)].mask
        return self._closure[indices]

    def _broken_at(self, indices: Tuple[int, ...]) -> Optional[Tuple[int, int]]:
        """
        Locate a broken circuit in an independent sorted set

        Returns:
            (position i, hyperplane H < indices[i] in the closure of indices[i:]) or None
        """
        for i in range(len(indices) - 1, -1, -1):
            mask = self._flat_mask(indices[i:])
            low = mask & ((1 << indices[i]) - 1)
            if low:
                return i, (low & -low).bit_length() - 1
        return None

    def is_nbc(self, indices: Sequence[int]) -> bool:
        indices = tuple(indices)
        if self._flat_mask(indices) is None:
            return False
        return self._broken_at(indices) is None

    def nbc_basis(self, degree: int) -> List[NbcMonomial]:
        """
        NBC monomials of a given degree, sorted

        Args:
            degree: 0 .. rank

        Returns:
            List of index tuples; empty when degree is out of range
        """
        if degree < 0 or degree > self.rank:
            return []
        if degree not in self._basis:
            result = []
            for smaller in self.nbc_basis(degree - 1):
                bound = smaller[0] if smaller else len(self.h)
                for j in range(bound):
                    candidate = (j,) + smaller
                    if self._flat_mask(candidate) is None:
                        continue
                    low = self._flat_mask(candidate) & ((1 << j) - 1)
                    if not low:
                        result.append(candidate)
            self._basis[degree] = sorted(result)
        return self._basis[degree]

    def betti(self) -> List[int]:
        return [len(self.nbc_basis(r)) for r in range(self.rank + 1)]

    def _circuit(self, hyperplane: int, support: Tuple[int, ...]) -> List[int]:
        """Elements of the independent set support used to write n_hyperplane"""
        normals = self.h.normals
        columns = [normals[j] for j in support] + [normals[hyperplane]]
        augmented = rat_matrix([[col[r] for col in columns] for r in range(self.h.k)], len(columns))
        reduced, _ = rref(augmented)
        grid = reduced.to_list()
        return [support[i] for i in range(len(support)) if grid[i][-1] != 0]

    def straighten(self, indices: Sequence[int]) -> OsElement:
        """
        Express a monomial e_{i1}...e_{ir} in the NBC basis

        Args:
            indices: Generator indices in product order

        Returns:
            OsElement over NBC monomials (empty for zero)
        """
        sign, ordered = sort_with_sign(indices)
        if sign == 0:
            return OsElement()
        return self._straighten_sorted(ordered).scaled(sign)

    def _straighten_sorted(self, indices: Tuple[int, ...]) -> OsElement:
        if indices in self._straight:
            return self._straight[indices]

        if self._flat_mask(indices) is None:
            result = OsElement()
        else:
            found = self._broken_at(indices)
            if found is None:
                result = OsElement({indices: 1})
            else:
                i, low = found
                broken = self._circuit(low, indices[i:])
                rest = [j for j in indices if j not in broken]
                lead, _ = sort_with_sign(broken + rest)
                result = OsElement()
                # e_B = Σ_{j>=1} (-1)^(j+1) e_{C - c_j} for the circuit C = (low, b_1, ..., b_m)
                for pos, b in enumerate(broken, start=1):
                    term = [low] + [c for c in broken if c != b] + rest
                    s, ordered = sort_with_sign(term)
                    if s == 0:
                        continue
                    coefficient = lead * s * (1 if pos % 2 else -1)
                    result += self._straighten_sorted(ordered).scaled(coefficient)

        self._straight[indices] = result
        return result

    def _hyperplane_images(self, g: Permutation) -> List[int]:
        if g not in self._action:
            self._action[g] = [j for j, _ in self.h.permutation_action(g)]
        return self._action[g]

    def act(self, g: Permutation, monomial: Sequence[int]) -> OsElement:
        """g·e_{i1}...e_{ir} = e_{g i1}...e_{g ir}, straightened"""
        images = self._hyperplane_images(g)
        return self.straighten([images[j] for j in monomial])

    def action_matrix(self, g: Permutation, degree: int) -> DomainMatrix:
        """Matrix of g on the degree-r component in the NBC basis (columns = images)"""
        basis = self.nbc_basis(degree)
        position = {m: i for i, m in enumerate(basis)}
        entries: Dict[int, Dict[int, int]] = {}
        for col, m in enumerate(basis):
            for image, c in self.act(g, m).items():
                entries.setdefault(position[image], {})[col] = c
        return _qq_matrix(entries, (len(basis), len(basis)))

    def character(self, g: Permutation, degree: int) -> int:
        """Trace of g on the degree-r component"""
        if g.degree != self.h.k:
            raise InvalidInputError(f"Permutation degree {g.degree} != {self.h.k}")
        return sum(self.act(g, m).get(m, 0) for m in self.nbc_basis(degree))

    def isotypic_dim(self, rep: str, degree: int, threads: int = 1) -> int:
        """
        Dimension of the trivial or sign isotypic part of a degree

        Evaluates one character per conjugacy class.

        Args:
            rep: "trivial" or "sign"
            degree: OS degree
            threads: joblib workers

        Returns:
            (1/k!) Σ_g rep(g) character(g, degree)
        """
        classes = conjugacy_classes(self.h.k)
        traces = Parallel(n_jobs=threads, prefer="threads")(
            delayed(self.character)(g, degree) for g, _ in classes
        )
        total = sum(size * rep_value(rep, g) * tr for (g, size), tr in zip(classes, traces))
        order = factorial(self.h.k)
        if total % order:
            raise InvalidInputError(
                f"Isotypic sum {total} is not divisible by {order}; arrangement is not Σ_k-stable"
            )
        return total // order

    def coordinates(self, element: OsElement, degree: int) -> Dict[int, int]:
        position = {m: i for i, m in enumerate(self.nbc_basis(degree))}
        return {position[m]: c for m, c in element.items()}


def _qq_matrix(entries: Dict[int, Dict[int, int]], shape: Tuple[int, int]) -> DomainMatrix:
    converted = {i: {j: QQ(v) for j, v in row.items() if v} for i, row in entries.items()}
    return DomainMatrix({i: r for i, r in converted.items() if r}, shape, QQ)


def _restriction_entries(sub: OrlikSolomonAlgebra, full: OrlikSolomonAlgebra, degree: int):
    if not sub.h.is_subset_of(full.h):
        raise InvalidInputError("Subarrangement is not contained in the full arrangement")
    lookup = full.h.index_of()
    rename = [lookup[n] for n in sub.h.normals]
    entries: Dict[int, Dict[int, int]] = {}
    for col, m in enumerate(sub.nbc_basis(degree)):
        image = full.straighten([rename[j] for j in m])
        for row, c in full.coordinates(image, degree).items():
            entries.setdefault(row, {})[col] = c
    shape = (len(full.nbc_basis(degree)), len(sub.nbc_basis(degree)))
    return entries, shape


def nbc_basis(lattice: IntersectionLattice, h: HyperplaneSet, degree: int) -> List[NbcMonomial]:
    return OrlikSolomonAlgebra(h, lattice).nbc_basis(degree)


def straighten(indices: Sequence[int], h: HyperplaneSet, lattice: IntersectionLattice) -> OsElement:
    return OrlikSolomonAlgebra(h, lattice).straighten(indices)


def restriction_rank(sub: OrlikSolomonAlgebra, full: OrlikSolomonAlgebra, degree: int) -> int:
    """
    Rank over QQ of OS(sub) -> OS(full), e_H -> e_H, in one degree

    Args:
        sub: Algebra of a subarrangement
        full: Algebra of the arrangement containing it
        degree: OS degree

    Returns:
        Rank of the degree-r map
    """
    entries, shape = _restriction_entries(sub, full, degree)
    return field_rank(entries, shape, QQ)


def isotypic_restriction_rank(
    sub: OrlikSolomonAlgebra, full: OrlikSolomonAlgebra, rep: str, degree: int
) -> int:
    """
    Rank of OS(sub) -> OS(full) restricted to the trivial or sign isotypic part

    Both arrangements must be Σ_k-stable; the rank is that of R·P where
    P = Σ_g rep(g) g is the (unnormalized) isotypic projector on OS(sub).
    """
    entries, shape = _restriction_entries(sub, full, degree)
    if 0 in shape:
        return 0
    restriction = _qq_matrix(entries, shape)
    n = shape[1]
    projector = DomainMatrix({}, (n, n), QQ)
    for g in Permutation.all(sub.h.k):
        term = sub.action_matrix(g, degree)
        if rep_value(rep, g) < 0:
            term = -term
        projector = projector + term
    product = restriction * projector
    if not product.to_sparse().rep:
        return 0
    return product.rank()
