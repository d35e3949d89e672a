"""
Exact linear algebra over the rationals and the integers
Reduced echelon forms, canonical subspaces, Smith normal form and field ranks
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import isprime
from sympy.polys.domains import GF, QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from ..exceptions import InvalidInputError

logger = logging.getLogger(__name__)

# Element type of sympy's rational field (PythonMPQ or gmpy2.mpq)
Rational = QQ.dtype

# Sparse integer matrix: row -> {col: value}, no stored zeros
SparseRows = Dict[int, Dict[int, int]]


def rational(numerator, denominator=1) -> Rational:
    """
    Exact rational in lowest terms with a positive denominator

    Args:
        numerator: Integer numerator
        denominator: Nonzero integer denominator

    Returns:
        QQ element
    """
    if denominator == 0:
        raise InvalidInputError("Zero denominator")
    return QQ(int(numerator), int(denominator))


def to_rational(value) -> Rational:
    """Convert ints, QQ elements and fraction-like objects to QQ"""
    if isinstance(value, int):
        return QQ(value)
    if QQ.of_type(value):
        return value
    numerator = getattr(value, "numerator", None)
    denominator = getattr(value, "denominator", None)
    if numerator is None or denominator is None:
        raise InvalidInputError(f"Not an exact rational: {value!r}")
    return rational(numerator, denominator)


def format_rational(value: Rational) -> str:
    """Render a rational as "n" or "n/d" """
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Rational:
    """Inverse of format_rational"""
    try:
        if "/" in text:
            num, den = text.split("/")
            return rational(int(num), int(den))
        return QQ(int(text))
    except ValueError as e:
        raise InvalidInputError(f"Not a rational: {text!r}") from e


def rat_matrix(rows: Sequence[Sequence], cols: Optional[int] = None) -> DomainMatrix:
    """
    Build a rational matrix

    Args:
        rows: Row lists of ints/rationals
        cols: Column count, required when rows is empty

    Returns:
        DomainMatrix over QQ
    """
    rows = [[to_rational(x) for x in row] for row in rows]
    if cols is None:
        if not rows:
            raise InvalidInputError("Column count needed for an empty matrix")
        cols = len(rows[0])
    if any(len(row) != cols for row in rows):
        raise InvalidInputError("Matrix rows must have equal length")
    return DomainMatrix(rows, (len(rows), cols), QQ)


def rref(m: DomainMatrix) -> Tuple[DomainMatrix, int]:
    """
    Reduced row-echelon form over QQ

    Args:
        m: Matrix over ZZ or QQ

    Returns:
        (rref matrix, rank)
    """
    if m.domain != QQ:
        m = m.convert_to(QQ)
    rows, cols = m.shape
    if rows == 0 or cols == 0:
        return m, 0
    reduced, pivots = m.rref()
    return reduced, len(pivots)


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), QQ(0))


def det_sign(rows: Sequence[Sequence]) -> int:
    """Sign of the determinant of a square rational matrix (empty matrix -> +1)"""
    if not rows:
        return 1
    det = rat_matrix(rows).det()
    if det == 0:
        raise InvalidInputError("Singular matrix where an orientation was expected")
    return 1 if det > 0 else -1


@dataclass(frozen=True)
class Subspace:
    """
    Linear subspace of QQ^n stored by the RREF of its annihilator

    Two subspaces are equal exactly when their normal_basis grids are equal.
    """

    ambient_dim: int
    normal_basis: Tuple[Tuple[Rational, ...], ...]

    @classmethod
    def ambient(cls, dim: int) -> "Subspace":
        return cls(dim, ())

    @classmethod
    def from_normals(cls, normals: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        """Canonical subspace cut out by the given normal vectors"""
        normals = [list(n) for n in normals]
        if any(len(n) != ambient_dim for n in normals):
            raise InvalidInputError(f"Normals must have length {ambient_dim}")
        if not normals:
            return cls.ambient(ambient_dim)
        reduced, rank = rref(rat_matrix(normals, ambient_dim))
        grid = reduced.to_list()[:rank]
        return cls(ambient_dim, tuple(tuple(row) for row in grid))

    @property
    def codim(self) -> int:
        return len(self.normal_basis)

    @property
    def dim(self) -> int:
        return self.ambient_dim - self.codim

    @property
    def pivots(self) -> Tuple[int, ...]:
        return tuple(next(j for j, x in enumerate(row) if x != 0) for row in self.normal_basis)

    def reduce(self, vector: Sequence) -> Tuple[Rational, ...]:
        """Remainder of a covector after elimination against the normal basis"""
        v = [to_rational(x) for x in vector]
        for row, p in zip(self.normal_basis, self.pivots):
            c = v[p]
            if c != 0:
                v = [a - c * b for a, b in zip(v, row)]
        return tuple(v)

    def contains_normal(self, normal: Sequence) -> bool:
        """True when the hyperplane with this normal contains the subspace"""
        return all(x == 0 for x in self.reduce(normal))

    def contains_vector(self, vector: Sequence) -> bool:
        return all(dot(row, vector) == 0 for row in self.normal_basis)

    def coordinates(self, normal: Sequence) -> Tuple[Rational, ...]:
        """Coordinates of a covector in the span of the normal basis"""
        return tuple(to_rational(normal[p]) for p in self.pivots)

    def is_contained_in(self, other: "Subspace") -> bool:
        if self.ambient_dim != other.ambient_dim:
            raise InvalidInputError("Dimension mismatch")
        return all(self.contains_normal(row) for row in other.normal_basis)

    def intersect(self, other: "Subspace") -> "Subspace":
        return intersect(self, other)

    def spanning_vectors(self) -> List[Tuple[Rational, ...]]:
        """A basis of the subspace itself"""
        n = self.ambient_dim
        if self.codim == 0:
            return [tuple(QQ(int(i == j)) for j in range(n)) for i in range(n)]
        if self.dim == 0:
            return []
        kernel = rat_matrix(self.normal_basis, n).nullspace()
        return [tuple(row) for row in kernel.to_list()]

    def permuted(self, images: Sequence[int]) -> "Subspace":
        """Image under the coordinate permutation i -> images[i]"""
        rows = []
        for row in self.normal_basis:
            new = [QQ(0)] * self.ambient_dim
            for i, x in enumerate(row):
                new[images[i]] = x
            rows.append(new)
        return Subspace.from_normals(rows, self.ambient_dim)

    def to_json(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "normal_basis": [[format_rational(x) for x in row] for row in self.normal_basis],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Subspace":
        grid = tuple(tuple(parse_rational(x) for x in row) for row in data["normal_basis"])
        return cls(int(data["ambient_dim"]), grid)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """
    Canonical form of a ∩ b

    Args:
        a: Subspace
        b: Subspace of the same ambient space

    Returns:
        Subspace whose codimension is the rank of the stacked normal bases
    """
    if a.ambient_dim != b.ambient_dim:
        raise InvalidInputError(f"Dimension mismatch: {a.ambient_dim} vs {b.ambient_dim}")
    if not b.normal_basis:
        return a
    if not a.normal_basis:
        return b
    return Subspace.from_normals(a.normal_basis + b.normal_basis, a.ambient_dim)


def _to_sparse(matrix) -> SparseRows:
    if isinstance(matrix, dict):
        return {i: {j: int(v) for j, v in row.items() if v} for i, row in matrix.items()}
    return {i: {j: int(v) for j, v in enumerate(row) if v} for i, row in enumerate(matrix)}


def smith_normal_form(matrix) -> List[int]:
    """
    Invariant factors of an integer matrix

    Pivots on the smallest nonzero absolute value and works on sparse rows,
    so boundary matrices of a few thousand cells stay cheap.

    Args:
        matrix: Row lists, or a sparse {row: {col: value}} mapping

    Returns:
        Positive integers d_1 | d_2 | ... | d_r, r = rank
    """
    rows = {i: r for i, r in _to_sparse(matrix).items() if r}
    cols: Dict[int, set] = {}
    for i, r in rows.items():
        for j in r:
            cols.setdefault(j, set()).add(i)

    def set_entry(i, j, value):
        if value:
            rows[i][j] = value
            cols.setdefault(j, set()).add(i)
        else:
            rows[i].pop(j, None)
            cols.get(j, set()).discard(i)

    def add_row(target, source, factor):
        for j, v in list(rows[source].items()):
            set_entry(target, j, rows[target].get(j, 0) + factor * v)

    def add_col(target, source, factor):
        for i in list(cols.get(source, ())):
            v = rows[i][source]
            set_entry(i, target, rows[i].get(target, 0) + factor * v)

    def smallest_entry():
        best = None
        for i, r in rows.items():
            for j, v in r.items():
                if best is None or abs(v) < abs(best[2]):
                    best = (i, j, v)
                    if abs(v) == 1:
                        return best
        return best

    factors = []
    while True:
        pivot = smallest_entry()
        if pivot is None:
            break
        pi, pj, pv = pivot

        while True:
            for i in sorted(cols[pj] - {pi}):
                add_row(i, pi, -(rows[i][pj] // pv))
            rest = [(abs(rows[i][pj]), i) for i in cols[pj] - {pi}]
            if rest:
                _, pi = min(rest)
                pv = rows[pi][pj]
                continue

            for j in sorted(set(rows[pi]) - {pj}):
                add_col(j, pj, -(rows[pi][j] // pv))
            rest = [(abs(rows[pi][j]), j) for j in set(rows[pi]) - {pj}]
            if rest:
                _, pj = min(rest)
                pv = rows[pi][pj]
                continue

            if abs(pv) != 1:
                culprit = next(
                    (i for i, r in rows.items() if i != pi and any(v % pv for v in r.values())),
                    None,
                )
                if culprit is not None:
                    add_row(pi, culprit, 1)
                    continue
            break

        factors.append(abs(pv))
        cols[pj].discard(pi)
        del rows[pi]
        rows = {i: r for i, r in rows.items() if r}

    return factors


def coefficient_domain(coeff: str, p: Optional[int] = None):
    """
    Sympy domain for a coefficient system

    Args:
        coeff: "Z", "Q" or "Fp"
        p: Prime, required for "Fp"

    Returns:
        ZZ, QQ or GF(p)
    """
    if coeff == "Z":
        return ZZ
    if coeff == "Q":
        return QQ
    if coeff == "Fp":
        if p is None or not isprime(int(p)):
            raise InvalidInputError(f"p must be prime, got {p}")
        return GF(int(p))
    raise InvalidInputError(f"Unknown coefficient system: {coeff}")


def domain_matrix(entries: SparseRows, shape: Tuple[int, int], domain) -> DomainMatrix:
    """Sparse integer entries as a DomainMatrix over the given domain"""
    converted = {}
    for i, row in entries.items():
        new_row = {}
        for j, v in row.items():
            x = domain.convert(int(v))
            if x:
                new_row[j] = x
        if new_row:
            converted[i] = new_row
    return DomainMatrix(converted, shape, domain)


def field_rank(entries: SparseRows, shape: Tuple[int, int], domain) -> int:
    """
    Rank of a sparse integer matrix over a field

    Args:
        entries: {row: {col: int}}
        shape: (rows, cols)
        domain: QQ or GF(p)

    Returns:
        Rank
    """
    m = domain_matrix(entries, shape, domain)
    if not m.to_sparse().rep or 0 in shape:
        return 0
    return m.rank()


def field_nullspace(m: DomainMatrix) -> DomainMatrix:
    """
    Kernel basis (as rows) of a matrix over a field

    Args:
        m: DomainMatrix over QQ or GF(p)

    Returns:
        DomainMatrix whose rows span {x : m x = 0}
    """
    rows, cols = m.shape
    domain = m.domain
    if cols == 0:
        return DomainMatrix({}, (0, 0), domain)
    if rows == 0 or not m.to_sparse().rep:
        return DomainMatrix({i: {i: domain.one} for i in range(cols)}, (cols, cols), domain)
    return m.to_sparse().nullspace().to_sparse()
