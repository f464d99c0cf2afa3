"""Components, outer shells, containment and assembly of the top operator.

Each connected piece of the (d-1)-skeleton is wrapped on its own.  Its outer
shell is split off, shells nested inside cells of other pieces are glued to
the innermost such cell as inner boundaries, and the per-piece blocks are
concatenated into the global operator.
"""

from __future__ import annotations

from contextlib import nullcontext
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .chains import SignedChain, SignedOperator
from .errors import AmbiguousOuter, ContainerNotFound, CoefficientOverflow, PointOnBoundary
from .geometry import point_in_polygon
from .lar import ChainComplexResult, GeometricComplex, cycle_measures
from .tgw import tgw

MEASURE_RTOL = 1e-9


@dataclass
class Component:
    cells: np.ndarray          # global (d-1)-cell indices, ascending
    boundary: SignedOperator   # global hinge rows, local columns
    complex: GeometricComplex  # local view usable by tgw and signed_measure
    wrapped: SignedOperator | None = None
    outer: SignedChain | None = None
    inner: SignedOperator | None = None
    measures: np.ndarray | None = None

    def to_global(self, column: dict[int, int]) -> dict[int, int]:
        return {int(self.cells[k]): v for k, v in column.items()}


@dataclass
class ShellForest:
    relation: np.ndarray                      # relation[i, j]: shell i lies inside shell j
    reduced_arcs: list = field(default_factory=list)  # (container, contained) after reduction
    depth: list = field(default_factory=list)
    arcs: list = field(default_factory=list)  # reduced arcs whose child depth is odd

    @property
    def roots(self) -> list[int]:
        return [i for i, d in enumerate(self.depth) if d == 0]


def _local_complex(complex: GeometricComplex, cells: np.ndarray, boundary: SignedOperator, d: int) -> GeometricComplex:
    if d == 2:
        return GeometricComplex(2, complex.V, [complex.EV[k] for k in cells])
    fv = [complex.FV[k] for k in cells] if complex.FV else []
    return GeometricComplex(3, complex.V, complex.EV, fv, face_boundary=boundary)


def split_components(boundary: SignedOperator, complex: GeometricComplex, d: int) -> list[Component]:
    """Connected pieces of the (d-1)-cells, joined through shared (d-2)-cells.

    For d=2 that is point connectivity.  For d=3 faces are joined through
    shared edges, since wrapping cannot pass a pinch at a lone vertex.
    """
    n = boundary.cols
    if n == 0:
        return []
    inc = boundary.matrix.tocoo()
    m = boundary.rows
    graph = coo_matrix(
        (np.ones(inc.nnz), (inc.col, n + inc.row)), shape=(n + m, n + m)
    )
    _, labels = connected_components(graph, directed=False)
    cell_labels = labels[:n]
    comps = []
    seen = {}
    for k, lab in enumerate(cell_labels):
        seen.setdefault(int(lab), []).append(k)
    for lab in sorted(seen, key=lambda l: seen[l][0]):
        cells = np.asarray(seen[lab], dtype=np.int64)
        op = SignedOperator(boundary.matrix[:, cells], grade=boundary.grade)
        comps.append(Component(cells, op, _local_complex(complex, cells, op, d)))
    return comps


def detect_hole_pairs(op: SignedOperator) -> list[tuple[int, int]]:
    """All column pairs (i, j), i < j, whose sum is the zero chain."""
    seen: dict[tuple, list[int]] = {}
    pairs = []
    for j in range(op.cols):
        r, v = op.column(j)
        if len(r) == 0:
            continue
        neg = (r.tobytes(), (-v.astype(np.int8)).tobytes())
        for i in seen.get(neg, []):
            pairs.append((i, j))
        seen.setdefault((r.tobytes(), v.tobytes()), []).append(j)
    return sorted(pairs)


def split_outer(wrapped: SignedOperator, complex: GeometricComplex, d: int):
    """Separate the outer shell from the bounded cells of one component.

    Returns (outer, inner, measures).  Bounded cells come back with positive
    measure and the outer shell with negative measure.
    """
    k = wrapped.cols
    chains = [wrapped.column_chain(j) for j in range(k)]
    chains = [SignedChain(d - 1, c.size, c.indices, c.values) for c in chains]
    meas = cycle_measures(wrapped, complex)
    scale = max(1.0, float(np.abs(meas).max()) if k else 1.0)
    if k == 2 and detect_hole_pairs(wrapped) == [(0, 1)]:
        if abs(meas[0]) <= MEASURE_RTOL * scale:
            raise AmbiguousOuter("cycle encloses no measure")
        out = 0 if meas[0] < 0 else 1
        sign = 1
    else:
        order = np.argsort(-np.abs(meas), kind="stable")
        out = int(order[0])
        if k > 1 and abs(abs(meas[order[0]]) - abs(meas[order[1]])) <= MEASURE_RTOL * scale:
            raise AmbiguousOuter("two cycles tie for the outer shell")
        sign = -1 if meas[out] > 0 else 1
    outer = chains[out] if sign == 1 else -chains[out]
    rest = [j for j in range(k) if j != out]
    cols = [{int(i): sign * int(v) for i, v in zip(chains[j].indices, chains[j].values)} for j in rest]
    inner = SignedOperator.from_columns(wrapped.rows, cols, grade=d)
    return outer, inner, sign * meas[rest]


def wrap_component(comp: Component, d: int, choose=None) -> Component:
    comp.wrapped = tgw(comp.boundary, comp.complex, d, choose=choose)
    comp.outer, comp.inner, comp.measures = split_outer(comp.wrapped, comp.complex, d)
    return comp


def _ray_face_parity(p, direction, faces, complex: GeometricComplex, tol):
    """Parity of crossings of the ray p + t*direction with a set of faces."""
    V = complex.V
    d2 = complex.boundary_2()
    crossings = 0
    for f in faces:
        rows, vals = d2.column(int(f))
        ends = np.array([sorted(complex.EV[r]) for r in rows])
        P, Q = V[ends[:, 0]], V[ends[:, 1]]
        ref = P[0]
        n = 0.5 * (vals[:, None] * np.cross(P - ref, Q - ref)).sum(axis=0)
        nn = np.linalg.norm(n)
        if nn == 0:
            continue
        n /= nn
        den = float(direction @ n)
        dist = float((ref - p) @ n)
        if abs(den) < 1e-12:
            if abs(dist) <= tol:
                return None
            continue
        t = dist / den
        if t <= tol:
            if t > -tol:
                return None
            continue
        hit = p + t * direction
        axis = int(np.argmax(np.abs(n)))
        keep = [k for k in range(3) if k != axis]
        segs = np.stack([P[:, keep], Q[:, keep]], axis=1)
        try:
            if point_in_polygon(hit[keep], segs, tol=tol):
                crossings += 1
        except PointOnBoundary:
            return None
    return crossings % 2 == 1


_RAYS = np.array(
    [
        [0.5773502691896258, 0.5772502691896258, 0.5774502691896258],
        [0.8017837257372732, -0.2672612419124244, 0.5345224838248488],
        [-0.3015113445777636, 0.9045340337332909, 0.3015113445777636],
        [0.1240347345892085, -0.4961389383568338, -0.8594395947155066],
        [-0.6963106238227914, -0.1740776559556978, 0.6963106238227914],
    ]
)


def point_in_cycle(p, cycle: SignedChain, complex: GeometricComplex, tol: float = 1e-10) -> bool:
    """Whether ``p`` lies in the bounded region enclosed by a (d-1)-cycle."""
    p = np.asarray(p, dtype=np.float64)
    support = cycle.indices
    if complex.dim == 2:
        segs = np.array([[complex.V[a], complex.V[b]] for a, b in (complex.EV[k] for k in support)])
        return point_in_polygon(p, segs, tol=tol)
    for ray in _RAYS:
        result = _ray_face_parity(p, ray / np.linalg.norm(ray), support, complex, tol)
        if result is not None:
            return result
    raise PointOnBoundary("every probe ray grazes the cycle; point is on or too near the boundary")


def cycle_vertices(cycle: SignedChain, complex: GeometricComplex) -> set[int]:
    if complex.dim == 2:
        return {v for k in cycle.indices for v in complex.EV[k]}
    d2 = complex.boundary_2()
    return {v for f in cycle.indices for r in d2.column(int(f))[0] for v in complex.EV[r]}


def reduce_relation(relation: np.ndarray) -> ShellForest:
    """Transitive reduction of a strict containment order, depths, odd-depth arcs.

    ``relation[i, j]`` means shell i lies inside shell j.  Roots have depth 0
    and an arc is kept in ``arcs`` when its child sits at odd depth.
    """
    R = np.asarray(relation, dtype=bool)
    h = R.shape[0]
    reduced = []
    for i in range(h):
        for j in range(h):
            if R[i, j] and not any(R[i, k] and R[k, j] for k in range(h) if k not in (i, j)):
                reduced.append((j, i))
    reduced.sort()
    depth = [int(R[i].sum()) for i in range(h)]
    arcs = [(j, i) for j, i in reduced if depth[i] % 2 == 1]
    return ShellForest(R, reduced, depth, arcs)


def containment_relation(shells: list[SignedChain], complex: GeometricComplex, tol: float = 1e-10) -> np.ndarray:
    """``R[i, j]`` is true when shell i lies inside shell j (one probe vertex per pair)."""
    h = len(shells)
    verts = [cycle_vertices(s, complex) for s in shells]
    lo = np.array([complex.V[sorted(v)].min(axis=0) for v in verts]) if h else np.zeros((0, complex.dim))
    hi = np.array([complex.V[sorted(v)].max(axis=0) for v in verts]) if h else np.zeros((0, complex.dim))
    R = np.zeros((h, h), dtype=bool)
    for i in range(h):
        for j in range(h):
            if i == j or np.any(lo[i] < lo[j] - tol) or np.any(hi[i] > hi[j] + tol):
                continue
            probe = sorted(verts[i] - verts[j])
            if not probe:
                continue
            R[i, j] = point_in_cycle(complex.V[probe[0]], shells[j], complex, tol)
    return R


def containment_forest(shells: list[SignedChain], complex: GeometricComplex, tol: float = 1e-10) -> ShellForest:
    """Nesting forest of pairwise disjoint shells."""
    return reduce_relation(containment_relation(shells, complex, tol))


def _timed(timings, name):
    from .pipeline import _stage

    if timings is None:
        return nullcontext()
    return _stage(timings, name)


def _adjoin(components, shells, forest, complex, d, n, tol) -> list[dict[int, int]]:
    blocks = []
    offsets = []
    measures = []
    for c in components:
        offsets.append(len(measures))
        blocks.extend(c.to_global(c.inner.column_dict(j)) for j in range(c.inner.cols))
        measures.extend(np.abs(c.measures).tolist())
    verts = [cycle_vertices(s, complex) for s in shells]
    for J, i in forest.reduced_arcs:
        point = complex.V[sorted(verts[i] - verts[J])[0]]
        best = None
        for k in range(components[J].inner.cols):
            g = offsets[J] + k
            chain = SignedChain.from_dict(d - 1, n, blocks[g])
            if (best is None or measures[g] < measures[best]) and point_in_cycle(point, chain, complex, tol):
                best = g
        if best is None:
            raise ContainerNotFound(f"shell {i} lies in no bounded cell of component {J}")
        col = dict(blocks[best])
        for k, v in shells[i].to_dict().items():
            col[k] = col.get(k, 0) + v
            if abs(col[k]) > 1:
                raise CoefficientOverflow("contained shell overlaps its container")
        blocks[best] = {k: v for k, v in col.items() if v}
    return blocks


def _stack(blocks, shells, forest, complex, d, n) -> ChainComplexResult:
    top = SignedOperator.from_columns(n, blocks, grade=d)
    outer = SignedChain.zero(d - 1, n)
    for r in forest.roots:
        outer = outer + shells[r]
    if d == 2:
        cells = [tuple(sorted({v for k in col for v in complex.EV[k]})) for col in blocks]
        return ChainComplexResult(
            dim=2,
            V=complex.V,
            cells={1: list(complex.EV), 2: cells},
            boundary={1: complex.boundary_1(), 2: top},
            outer=outer,
        )
    d2 = complex.boundary_2()
    cells = [tuple(sorted({v for f in col for r in d2.column(f)[0] for v in complex.EV[r]})) for col in blocks]
    return ChainComplexResult(
        dim=3,
        V=complex.V,
        cells={1: list(complex.EV), 2: list(complex.FV), 3: cells},
        boundary={1: complex.boundary_1(), 2: d2, 3: top},
        outer=outer,
    )


def assemble(components: list[Component], complex: GeometricComplex, d: int, tol: float = 1e-10,
             timings: dict | None = None) -> ChainComplexResult:
    """Glue nested shells into their container cells and stack the blocks.

    Every reduced arc attaches the contained shell to the innermost bounded
    cell of its container component holding a probe vertex of that shell.
    The outer cell is bounded by the union of the root shells.
    """
    n = len(complex.EV) if d == 2 else len(complex.FV)
    shells = [SignedChain.from_dict(d - 1, n, c.to_global(c.outer.to_dict())) for c in components]
    with _timed(timings, "Containment"):
        relation = containment_relation(shells, complex, tol)
    with _timed(timings, "Reduction"):
        forest = reduce_relation(relation)
    with _timed(timings, "Adjoining"):
        blocks = _adjoin(components, shells, forest, complex, d, n, tol)
    with _timed(timings, "Assembling"):
        result = _stack(blocks, shells, forest, complex, d, n)
    result.stats["forest"] = forest
    return result
