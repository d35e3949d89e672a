"""
Salvetti complexes of complexified central arrangements
Real faces, cells and boundaries, the Σ_k action, twisted quotients,
homology and the cellular model of an inclusion of complements
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy import sparse
from sympy.polys.matrices import DomainMatrix
from tqdm import tqdm

from ..exceptions import (
    ComArrError,
    InvalidInputError,
    NonFreeActionError,
    OracleDisagreement,
    ResourceLimitError,
)
from ..utils.exact import (
    SparseRows,
    coefficient_domain,
    det_sign,
    domain_matrix,
    dot,
    field_nullspace,
    field_rank,
    smith_normal_form,
)
from ..utils.permutations import Permutation
from .arrangements import ArrangementSpec, Family, HyperplaneSet, build
from .lattice import IntersectionLattice, build_lattice, poincare_polynomial
from .os_algebra import OrlikSolomonAlgebra, isotypic_restriction_rank

logger = logging.getLogger(__name__)

TWISTS = ("trivial", "sign")


class Face(NamedTuple):
    """Sign vector as bitmasks of the hyperplanes on the + and - sides"""

    pos: int
    neg: int

    @property
    def support(self) -> int:
        return self.pos | self.neg

    def compose(self, other: "Face") -> "Face":
        free = ~self.support
        return Face(self.pos | (other.pos & free), self.neg | (other.neg & free))

    def negated(self) -> "Face":
        return Face(self.neg, self.pos)

    def restrict(self, mask: int) -> "Face":
        return Face(self.pos & mask, self.neg & mask)

    def to_string(self, n: int) -> str:
        return "".join(
            "+" if self.pos >> j & 1 else "-" if self.neg >> j & 1 else "0" for j in range(n)
        )


class Cell(NamedTuple):
    """Salvetti cell <C, F>: a chamber (its + set) and a face in its closure"""

    chamber: int
    face: Face


@dataclass
class GroupAction:
    """
    Free Σ_k action on cells, recorded per dimension

    For cell c = g·R with R its orbit representative: orbit[c] numbers the
    orbit, orient[c] is the orientation sign of g on R, parity[c] = sgn(g).
    """

    k: int
    reps: List[List[int]]
    orbit: List[List[int]]
    orient: List[List[int]]
    parity: List[List[int]]


@dataclass
class CellComplex:
    h: HyperplaneSet
    lattice: IntersectionLattice
    cells: List[List[Cell]]
    boundaries: Dict[int, sparse.csr_matrix]
    action: Optional[GroupAction] = None
    index: List[Dict[Cell, int]] = field(default_factory=list, repr=False)

    def __post_init__(self):
        if not self.index:
            self.index = [{c: i for i, c in enumerate(cs)} for cs in self.cells]

    @property
    def top(self) -> int:
        return len(self.cells) - 1

    @property
    def full(self) -> int:
        return (1 << len(self.h)) - 1

    def size(self, d: int) -> int:
        return len(self.cells[d]) if 0 <= d <= self.top else 0

    def sizes(self) -> List[int]:
        return [len(c) for c in self.cells]

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * n for d, n in enumerate(self.sizes()))

    def flat_of(self, face: Face) -> int:
        idx = self.lattice.index_of_mask(self.full & ~face.support)
        if idx is None:
            raise ComArrError(f"Zero set of face {face.to_string(len(self.h))} is not a flat")
        return idx

    def cell_label(self, cell: Cell) -> str:
        n = len(self.h)
        chamber = Face(cell.chamber, self.full & ~cell.chamber)
        return f"<{chamber.to_string(n)}, {cell.face.to_string(n)}>"


@dataclass
class ChainComplex:
    """Free chain complex; boundaries[d] has shape sizes[d-1] x sizes[d]"""

    sizes: List[int]
    boundaries: Dict[int, SparseRows]

    def size(self, d: int) -> int:
        return self.sizes[d] if 0 <= d < len(self.sizes) else 0

    def boundary(self, d: int) -> SparseRows:
        return self.boundaries.get(d, {})


@dataclass
class DegreeHomology:
    degree: int
    rank: int
    torsion: List[int] = field(default_factory=list)


def _csr(entries: SparseRows, shape: Tuple[int, int]) -> sparse.csr_matrix:
    rows, cols, data = [], [], []
    for i, row in entries.items():
        for j, v in row.items():
            if v:
                rows.append(i)
                cols.append(j)
                data.append(v)
    coo = sparse.coo_matrix(
        (np.array(data, dtype=np.int64), (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
        shape=shape,
    )
    return coo.tocsr()


def _rows(m: sparse.spmatrix) -> SparseRows:
    coo = m.tocoo()
    out: SparseRows = {}
    for i, j, v in zip(coo.row, coo.col, coo.data):
        if v:
            out.setdefault(int(i), {})[int(j)] = int(v)
    return out


def _is_zero(m: sparse.spmatrix) -> bool:
    return m.count_nonzero() == 0


def _sign_vector(normals, vector) -> Face:
    pos = neg = 0
    for j, n in enumerate(normals):
        s = dot(n, vector)
        if s > 0:
            pos |= 1 << j
        elif s < 0:
            neg |= 1 << j
    return Face(pos, neg)


def cocircuits(h: HyperplaneSet, lattice: IntersectionLattice) -> List[Face]:
    """Sign vectors of the rays: one opposite pair per flat of rank r-1"""
    r = lattice.rank if len(h) else 0
    if r == 0:
        return []
    out = []
    for idx in lattice.nodes_of_rank(r - 1):
        for v in lattice.nodes[idx].subspace.spanning_vectors():
            face = _sign_vector(h.normals, v)
            if face.support:
                break
        out.extend([face, face.negated()])
    return sorted(out)


def enumerate_faces(h: HyperplaneSet, lattice: Optional[IntersectionLattice] = None) -> List[Face]:
    """
    All faces of the real arrangement

    Every covector is a composition of cocircuits, so the faces are the
    closure of the cocircuits under composition, plus the zero face.
    Works with or without a lineality space.

    Args:
        h: Hyperplane set
        lattice: Its lattice (built when omitted)

    Returns:
        Sorted list of faces
    """
    lattice = lattice if lattice is not None else build_lattice(h)
    full = (1 << len(h)) - 1
    rays = cocircuits(h, lattice)
    faces = {Face(0, 0)} | set(rays)
    frontier = list(rays)
    while frontier:
        new = []
        for x in frontier:
            if x.support == full:
                continue
            for c in rays:
                y = x.compose(c)
                if y not in faces:
                    faces.add(y)
                    new.append(y)
        frontier = new
    result = sorted(faces)
    logger.debug(f"Enumerated {len(result)} faces from {len(rays)} cocircuits")
    return result


def chambers(faces: List[Face], n: int) -> List[Face]:
    full = (1 << n) - 1
    return [f for f in faces if f.support == full]


def build_salvetti(
    h: HyperplaneSet,
    lattice: Optional[IntersectionLattice] = None,
    faces: Optional[List[Face]] = None,
    max_cells: Optional[int] = None,
    progress: bool = False,
) -> CellComplex:
    """
    Build the Salvetti complex with integer boundaries

    Cells are <C, F> with F a face and C a chamber containing F; the cell
    has dimension rank(F). The boundary of <C, F> runs over the faces G
    covering F and hits <G∘C, G>. Orientations come from the RREF normal
    basis of each flat.

    Args:
        h: Hyperplane set
        lattice: Intersection lattice of h
        faces: Output of enumerate_faces
        max_cells: Refuse complexes with more cells
        progress: Show a progress bar while assembling boundaries

    Returns:
        CellComplex, checked for ∂∘∂ = 0 and Euler characteristic
    """
    lattice = lattice if lattice is not None else build_lattice(h)
    faces = faces if faces is not None else enumerate_faces(h, lattice)
    n = len(h)
    full = (1 << n) - 1
    top = lattice.rank if n else 0

    def flat_of(face: Face) -> int:
        idx = lattice.index_of_mask(full & ~face.support)
        if idx is None:
            raise ComArrError(f"Zero set of face {face.to_string(n)} is not a flat")
        return idx

    face_flat = {f: flat_of(f) for f in faces}
    zero_masks = [node.mask for node in lattice.nodes]

    # chamber restrictions and covering-face restrictions per flat
    local_chambers: List[set] = [set() for _ in lattice.nodes]
    local_covers: List[set] = [set() for _ in lattice.nodes]
    for f in chambers(faces, n):
        for x, z in enumerate(zero_masks):
            local_chambers[x].add(f.pos & z)
    for f, y in face_flat.items():
        for x in lattice.covers[y]:
            local_covers[x].add(f.restrict(zero_masks[x]))

    total = sum(len(local_chambers[face_flat[f]]) for f in faces)
    if max_cells is not None and total > max_cells:
        raise ResourceLimitError(f"Salvetti complex would have {total} cells (limit {max_cells})")

    cells: List[List[Cell]] = [[] for _ in range(top + 1)]
    for f in faces:
        x = face_flat[f]
        for kappa in local_chambers[x]:
            cells[lattice.nodes[x].rank].append(Cell(f.pos | kappa, f))
    for cs in cells:
        cs.sort()
    index = [{c: i for i, c in enumerate(cs)} for cs in cells]

    incidence_cache: Dict[Tuple[int, Face], int] = {}

    def incidence(x: int, tau: Face) -> int:
        key = (x, tau)
        if key not in incidence_cache:
            bx = lattice.nodes[x].subspace
            y = lattice.index_of_mask(zero_masks[x] & ~tau.support)
            u = [0] * h.k
            for j, normal in enumerate(h.normals):
                s = 1 if tau.pos >> j & 1 else -1 if tau.neg >> j & 1 else 0
                if s:
                    u = [a + s * b for a, b in zip(u, normal)]
            rows = [bx.coordinates(u)] + [bx.coordinates(b) for b in lattice.nodes[y].subspace.normal_basis]
            incidence_cache[key] = det_sign(rows)
        return incidence_cache[key]

    boundaries: Dict[int, sparse.csr_matrix] = {}
    for d in range(1, top + 1):
        entries: SparseRows = {}
        for col, cell in enumerate(tqdm(cells[d], desc=f"∂{d}", disable=not progress, leave=False)):
            x = face_flat[cell.face]
            for tau in local_covers[x]:
                g = Face(cell.face.pos | tau.pos, cell.face.neg | tau.neg)
                target = Cell(g.pos | (cell.chamber & ~g.support), g)
                row = index[d - 1][target]
                entries.setdefault(row, {})[col] = incidence(x, tau)
        boundaries[d] = _csr(entries, (len(cells[d - 1]), len(cells[d])))

    cx = CellComplex(h, lattice, cells, boundaries, index=index)
    _check_boundaries(cx.boundaries, cx.top)

    expected = poincare_polynomial(lattice)(-1) if n else 1
    if cx.euler_characteristic() != expected:
        raise ComArrError(
            f"Euler characteristic {cx.euler_characteristic()} != π(A,-1) = {expected}"
        )
    logger.info(f"✅ Built Salvetti complex: cells per dimension {cx.sizes()}")
    return cx


def _check_boundaries(boundaries: Dict[int, sparse.spmatrix], top: int):
    for d in range(2, top + 1):
        if not _is_zero(boundaries[d - 1] @ boundaries[d]):
            raise ComArrError(f"∂{d - 1}∘∂{d} != 0")


def _face_image(face: Face, action: List[Tuple[int, int]]) -> Face:
    pos = neg = 0
    for j, (target, sign) in enumerate(action):
        if face.pos >> j & 1:
            if sign > 0:
                pos |= 1 << target
            else:
                neg |= 1 << target
        elif face.neg >> j & 1:
            if sign > 0:
                neg |= 1 << target
            else:
                pos |= 1 << target
    return Face(pos, neg)


def _cell_image(cell: Cell, action: List[Tuple[int, int]], full: int) -> Cell:
    chamber = _face_image(Face(cell.chamber, full & ~cell.chamber), action).pos
    return Cell(chamber, _face_image(cell.face, action))


class _Orientation:
    """Sign of det(g : ann(X) -> ann(gX)) in the RREF bases, memoized per (flat, g)"""

    def __init__(self, lattice: IntersectionLattice):
        self.lattice = lattice
        self.cache: Dict[Tuple[int, Permutation], int] = {}

    def __call__(self, flat: int, g: Permutation) -> int:
        key = (flat, g)
        if key not in self.cache:
            x = self.lattice.nodes[flat].subspace
            gx = x.permuted(g.images)
            rows = [gx.coordinates(g.apply_to_vector(b)) for b in x.normal_basis]
            self.cache[key] = det_sign(rows)
        return self.cache[key]


def action_matrix(cx: CellComplex, g: Permutation, d: int, orientation: Optional[_Orientation] = None) -> sparse.csr_matrix:
    """Signed permutation matrix of g on the d-cells"""
    orientation = orientation or _Orientation(cx.lattice)
    action = cx.h.permutation_action(g)
    entries: SparseRows = {}
    for col, cell in enumerate(cx.cells[d]):
        row = cx.index[d][_cell_image(cell, action, cx.full)]
        entries[row] = {col: orientation(cx.flat_of(cell.face), g)}
    return _csr(entries, (cx.size(d), cx.size(d)))


def group_action(cx: CellComplex, k: Optional[int] = None) -> CellComplex:
    """
    Record the Σ_k action on cells and verify it is free

    Args:
        cx: Salvetti complex of a Σ_k-stable arrangement
        k: Group degree (defaults to the ambient dimension)

    Returns:
        The same complex with its action attached
    """
    k = cx.h.k if k is None else k
    if k != cx.h.k:
        raise InvalidInputError(f"Σ_{k} does not act on QQ^{cx.h.k}")
    group = Permutation.all(k)
    actions = {g: cx.h.permutation_action(g) for g in group}
    orientation = _Orientation(cx.lattice)

    reps, orbit, orient, parity = [], [], [], []
    for d in range(cx.top + 1):
        n = cx.size(d)
        d_reps: List[int] = []
        d_orbit: List[Optional[int]] = [None] * n
        d_orient = [0] * n
        d_parity = [0] * n
        for i, cell in enumerate(cx.cells[d]):
            if d_orbit[i] is not None:
                continue
            number = len(d_reps)
            d_reps.append(i)
            flat = cx.flat_of(cell.face)
            for g in group:
                j = cx.index[d].get(_cell_image(cell, actions[g], cx.full))
                if j is None:
                    raise ComArrError(f"Image of {cx.cell_label(cell)} is not a cell")
                if d_orbit[j] is not None:
                    raise NonFreeActionError(
                        f"Cell {cx.cell_label(cell)} has a nontrivial stabilizer", cell=cx.cell_label(cell)
                    )
                d_orbit[j] = number
                d_orient[j] = orientation(flat, g)
                d_parity[j] = g.sign
        reps.append(d_reps)
        orbit.append(d_orbit)
        orient.append(d_orient)
        parity.append(d_parity)

    for g in Permutation.generators(k):
        for d in range(1, cx.top + 1):
            lhs = cx.boundaries[d] @ action_matrix(cx, g, d, orientation)
            rhs = action_matrix(cx, g, d - 1, orientation) @ cx.boundaries[d]
            if not _is_zero(lhs - rhs):
                raise ComArrError(f"Action of {g.one_based()} does not commute with ∂{d}")

    cx.action = GroupAction(k, reps, orbit, orient, parity)
    logger.info(f"✅ Free Σ_{k} action: orbits per dimension {[len(r) for r in reps]}")
    return cx


def _check_twist(twist: str):
    if twist not in TWISTS:
        raise InvalidInputError(f"Unknown twist: {twist}")


def chain_complex(cx: CellComplex, quotient: bool = False, twist: str = "trivial") -> ChainComplex:
    """
    Cellular chains, or chains of the quotient with trivial/sign coefficients

    In C ⊗_{Z[Σ_k]} S a cell c = g·R equals orient(c)·rep(g)·R, which gives
    the quotient boundary on orbit representatives.

    Args:
        cx: Cell complex
        quotient: Pass to orbits (requires group_action)
        twist: "trivial" or "sign"

    Returns:
        ChainComplex
    """
    _check_twist(twist)
    if not quotient:
        return ChainComplex(cx.sizes(), {d: _rows(b) for d, b in cx.boundaries.items()})
    if cx.action is None:
        raise InvalidInputError("Quotient requested but no group action is recorded")

    act = cx.action
    sizes = [len(r) for r in act.reps]
    boundaries: Dict[int, SparseRows] = {}
    for d in range(1, cx.top + 1):
        csc = cx.boundaries[d].tocsc()
        entries: SparseRows = {}
        for a, r in enumerate(act.reps[d]):
            start, end = csc.indptr[r], csc.indptr[r + 1]
            for row, v in zip(csc.indices[start:end], csc.data[start:end]):
                factor = act.orient[d - 1][row] * (act.parity[d - 1][row] if twist == "sign" else 1)
                b = act.orbit[d - 1][row]
                value = entries.setdefault(b, {}).get(a, 0) + int(v) * factor
                if value:
                    entries[b][a] = value
                else:
                    entries[b].pop(a, None)
        boundaries[d] = {i: r for i, r in entries.items() if r}

    _check_boundaries({d: _csr(b, (sizes[d - 1], sizes[d])) for d, b in boundaries.items()}, cx.top)
    return ChainComplex(sizes, boundaries)


def chain_homology(cc: ChainComplex, coeff: str = "Q", p: Optional[int] = None) -> List[DegreeHomology]:
    """
    Homology of a free chain complex

    Args:
        cc: Chain complex
        coeff: "Z", "Q" or "Fp"
        p: Prime for "Fp"

    Returns:
        One DegreeHomology per degree (torsion only over Z)
    """
    domain = coefficient_domain(coeff, p)
    top = len(cc.sizes) - 1
    ranks = [0] * (top + 2)
    factors: Dict[int, List[int]] = {}
    for d in range(1, top + 1):
        shape = (cc.size(d - 1), cc.size(d))
        if coeff == "Z":
            factors[d] = smith_normal_form(cc.boundary(d))
            ranks[d] = len(factors[d])
        else:
            ranks[d] = field_rank(cc.boundary(d), shape, domain)

    result = []
    for d in range(top + 1):
        free = cc.size(d) - ranks[d] - ranks[d + 1]
        torsion = [f for f in factors.get(d + 1, []) if f > 1]
        result.append(DegreeHomology(d, free, torsion))
    return result


def homology(
    cx: CellComplex, coeff: str = "Q", p: Optional[int] = None, quotient: bool = False, twist: str = "trivial"
) -> List[DegreeHomology]:
    """Homology of a Salvetti complex or of its Σ_k quotient"""
    coefficient_domain(coeff, p)
    return chain_homology(chain_complex(cx, quotient, twist), coeff, p)


@dataclass
class CellularMap:
    """Chain map between complexes; matrices[d] has shape target d-cells x source d-cells"""

    source: CellComplex
    target: CellComplex
    matrices: Dict[int, SparseRows]

    def csr(self, d: int) -> sparse.csr_matrix:
        return _csr(self.matrices.get(d, {}), (self.target.size(d), self.source.size(d)))


def inclusion_cellular_map(fine: CellComplex, coarse: CellComplex) -> CellularMap:
    """
    Cellular model of complement(fine) -> complement(coarse)

    <C, F> maps to <C', F'> (restricted sign vectors) when the dimension is
    kept and to 0 otherwise.

    Args:
        fine: Complex of the larger arrangement
        coarse: Complex of a subarrangement

    Returns:
        CellularMap, checked to commute with ∂ and with the group action
    """
    if not coarse.h.is_subset_of(fine.h):
        raise InvalidInputError("Coarse arrangement is not a subset of the fine arrangement")
    lookup = fine.h.index_of()
    positions = [lookup[n] for n in coarse.h.normals]

    def restrict(mask: int) -> int:
        out = 0
        for i, p in enumerate(positions):
            if mask >> p & 1:
                out |= 1 << i
        return out

    matrices: Dict[int, SparseRows] = {}
    for d in range(fine.top + 1):
        entries: SparseRows = {}
        for col, cell in enumerate(fine.cells[d]):
            face = Face(restrict(cell.face.pos), restrict(cell.face.neg))
            if coarse.lattice.nodes[coarse.flat_of(face)].rank != d:
                continue
            row = coarse.index[d].get(Cell(restrict(cell.chamber), face))
            if row is None:
                raise ComArrError(f"Restriction of {fine.cell_label(cell)} is not a cell")
            entries.setdefault(row, {})[col] = 1
        matrices[d] = entries

    cmap = CellularMap(fine, coarse, matrices)
    for d in range(1, fine.top + 1):
        target_boundary = (
            coarse.boundaries[d] if d <= coarse.top else _csr({}, (coarse.size(d - 1), 0))
        )
        lhs = target_boundary @ cmap.csr(d)
        rhs = cmap.csr(d - 1) @ fine.boundaries[d]
        if not _is_zero(lhs - rhs):
            raise ComArrError(f"Inclusion map does not commute with ∂{d}")

    if fine.action is not None and coarse.action is not None:
        fine_orient, coarse_orient = _Orientation(fine.lattice), _Orientation(coarse.lattice)
        for g in Permutation.generators(fine.h.k):
            for d in range(min(fine.top, coarse.top) + 1):
                lhs = cmap.csr(d) @ action_matrix(fine, g, d, fine_orient)
                rhs = action_matrix(coarse, g, d, coarse_orient) @ cmap.csr(d)
                if not _is_zero(lhs - rhs):
                    raise ComArrError(f"Inclusion map is not Σ_k-equivariant in degree {d}")
    return cmap


def quotient_map(cmap: CellularMap, twist: str = "trivial") -> Dict[int, SparseRows]:
    """The chain map induced on quotient complexes with the given twist"""
    _check_twist(twist)
    src, tgt = cmap.source.action, cmap.target.action
    if src is None or tgt is None:
        raise InvalidInputError("Both complexes need a recorded group action")
    out: Dict[int, SparseRows] = {}
    for d in range(cmap.source.top + 1):
        csc = cmap.csr(d).tocsc()
        entries: SparseRows = {}
        for a, r in enumerate(src.reps[d]):
            start, end = csc.indptr[r], csc.indptr[r + 1]
            for row, v in zip(csc.indices[start:end], csc.data[start:end]):
                factor = tgt.orient[d][row] * (tgt.parity[d][row] if twist == "sign" else 1)
                b = tgt.orbit[d][row]
                value = entries.setdefault(b, {}).get(a, 0) + int(v) * factor
                if value:
                    entries[b][a] = value
                else:
                    entries[b].pop(a, None)
        out[d] = {i: r for i, r in entries.items() if r}
    return out


def induced_map_rank(
    source: ChainComplex, target: ChainComplex, chain_map: Dict[int, SparseRows], degree: int, domain
) -> int:
    """
    Rank of H_d(f) over a field

    rank = rank[B | f·Z] - rank[B] with Z a basis of the d-cycles of the
    source and B the d-boundaries of the target.

    Args:
        source: Source chain complex
        target: Target chain complex
        chain_map: Per-degree integer matrices (target x source)
        degree: Homological degree
        domain: QQ or GF(p)

    Returns:
        Rank of the induced map
    """
    d = degree
    n_src, n_tgt = source.size(d), target.size(d)
    if n_src == 0 or n_tgt == 0:
        return 0

    cycles = field_nullspace(domain_matrix(source.boundary(d), (source.size(d - 1), n_src), domain))
    cycle_rows = cycles.to_sparse().rep

    columns: Dict[int, Dict[int, int]] = {}
    for i, row in chain_map.get(d, {}).items():
        for j, v in row.items():
            columns.setdefault(j, {})[i] = v

    boundary = target.boundary(d + 1)
    n_b = target.size(d + 1)
    combined: Dict[int, Dict[int, object]] = {i: dict(r) for i, r in domain_matrix(boundary, (n_tgt, n_b), domain).to_sparse().rep.items()}

    n_z = cycles.shape[0]
    for z in range(n_z):
        image: Dict[int, object] = {}
        for j, zj in cycle_rows.get(z, {}).items():
            for i, v in columns.get(j, {}).items():
                image[i] = image.get(i, domain.zero) + domain.convert(v) * zj
        for i, value in image.items():
            if value:
                combined.setdefault(i, {})[n_b + z] = value

    combined = {i: r for i, r in combined.items() if r}
    if not combined:
        return 0
    total = DomainMatrix(combined, (n_tgt, n_b + n_z), domain).rank()
    base = field_rank(boundary, (n_tgt, n_b), domain)
    return total - base


@dataclass
class MapRow:
    degree: int
    dim_source: int
    dim_target: int
    rank: int

    @property
    def surjective(self) -> bool:
        return self.rank == self.dim_target

    @property
    def injective(self) -> bool:
        return self.rank == self.dim_source


@dataclass
class OracleRow:
    degree: int
    cellular_rank: int
    os_rank: int
    cellular_dims: Tuple[int, int]
    os_dims: Tuple[int, int]

    @property
    def agrees(self) -> bool:
        return self.cellular_rank == self.os_rank and self.cellular_dims == self.os_dims


@dataclass
class ComparisonResult:
    """H_d(A/Σ_k; F_p(twist)) -> H_d(Conf(C,k)/Σ_k; F_p(twist)), per degree"""

    family: str
    t: int
    k: int
    p: int
    twist: str
    rows: List[MapRow]
    oracle: List[OracleRow]
    identity: bool
    source_cells: List[int]
    target_cells: List[int]

    @property
    def oracle_agreement(self) -> bool:
        return all(r.agrees for r in self.oracle)

    @property
    def non_surjective_degrees(self) -> List[int]:
        return [r.degree for r in self.rows if not r.surjective]

    @property
    def verdict(self) -> Optional[str]:
        if not self.oracle_agreement:
            return None
        bad = self.non_surjective_degrees
        if bad:
            return f"not surjective in degree(s) {', '.join(map(str, bad))}"
        return "surjective in every degree"


def compare_quotients(
    t: int,
    k: int,
    p: int = 2,
    twist: str = "trivial",
    family: Family = Family.M,
    max_cells: Optional[int] = None,
    max_hyperplanes: Optional[int] = None,
    force: bool = False,
    threads: int = 1,
    progress: bool = False,
) -> ComparisonResult:
    """
    Compare quotient homology of M(t,k) (or M'(t,k)) with Conf(C,k) over F_p

    Before any F_p table is trusted, the same pipeline over QQ is checked
    against the Orlik-Solomon restriction map on the twist-isotypic parts.

    Returns:
        ComparisonResult; its verdict is None when the oracle disagrees
    """
    _check_twist(twist)
    family = Family(family)
    if family == Family.BRAID:
        raise InvalidInputError("Compare needs family M or Mprime")
    fp = coefficient_domain("Fp", p)
    qq = coefficient_domain("Q")

    fine_h = build(ArrangementSpec(family=family, t=t, k=k))
    coarse_h = build(ArrangementSpec(family=Family.BRAID, k=k))
    fine_l = build_lattice(fine_h, max_hyperplanes, force)
    coarse_l = build_lattice(coarse_h, max_hyperplanes, force)

    fine = group_action(build_salvetti(fine_h, fine_l, max_cells=max_cells, progress=progress))
    coarse = group_action(build_salvetti(coarse_h, coarse_l, max_cells=max_cells, progress=progress))
    cmap = inclusion_cellular_map(fine, coarse)

    src = chain_complex(fine, True, twist)
    tgt = chain_complex(coarse, True, twist)
    fq = quotient_map(cmap, twist)
    degrees = range(max(fine.top, coarse.top) + 1)

    src_p, tgt_p = chain_homology(src, "Fp", p), chain_homology(tgt, "Fp", p)
    rows = [
        MapRow(d, _dim(src_p, d), _dim(tgt_p, d), induced_map_rank(src, tgt, fq, d, fp)) for d in degrees
    ]

    fine_os = OrlikSolomonAlgebra(fine_h, fine_l)
    coarse_os = OrlikSolomonAlgebra(coarse_h, coarse_l)
    src_q, tgt_q = chain_homology(src, "Q"), chain_homology(tgt, "Q")
    oracle = []
    for d in degrees:
        oracle.append(
            OracleRow(
                d,
                induced_map_rank(src, tgt, fq, d, qq),
                isotypic_restriction_rank(coarse_os, fine_os, twist, d),
                (_dim(src_q, d), _dim(tgt_q, d)),
                (fine_os.isotypic_dim(twist, d, threads), coarse_os.isotypic_dim(twist, d, threads)),
            )
        )

    result = ComparisonResult(
        family.value,
        t,
        k,
        p,
        twist,
        rows,
        oracle,
        fine_h.normals == coarse_h.normals,
        [len(r) for r in fine.action.reps],
        [len(r) for r in coarse.action.reps],
    )
    if result.oracle_agreement:
        logger.info(f"✅ QQ oracle agrees; {result.verdict}")
    else:
        logger.warning("⚠️ QQ oracle disagrees with the cellular inclusion model; verdict withheld")
    return result


def _dim(hom: List[DegreeHomology], d: int) -> int:
    return hom[d].rank if 0 <= d < len(hom) else 0


def mod2_surjectivity_report(t: int, k: int, **kwargs) -> ComparisonResult:
    """
    Mod-2 table for H_d(M(t,k)/Σ_k) -> H_d(Conf(C,k)/Σ_k)

    Raises:
        OracleDisagreement: QQ ranks disagree with the Orlik-Solomon oracle
    """
    result = compare_quotients(t, k, p=2, twist="trivial", **kwargs)
    if not result.oracle_agreement:
        raise OracleDisagreement(f"QQ oracle disagrees for M({t},{k}); mod-2 verdict withheld")
    return result


def complex_to_json(cx: CellComplex) -> dict:
    """Cells as sign strings and boundaries as (row, col, value) triplets"""
    n = len(cx.h)
    cells = []
    for d, cs in enumerate(cx.cells):
        cells.append(
            [
                {"chamber": Face(c.chamber, cx.full & ~c.chamber).to_string(n), "face": c.face.to_string(n)}
                for c in cs
            ]
        )
    boundaries = {}
    for d, b in cx.boundaries.items():
        coo = b.tocoo()
        boundaries[str(d)] = sorted([int(i), int(j), int(v)] for i, j, v in zip(coo.row, coo.col, coo.data) if v)
    return {"k": cx.h.k, "normals": [list(n) for n in cx.h.normals], "cells": cells, "boundaries": boundaries}
