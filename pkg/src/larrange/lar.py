"""The LAR geometric-complex model and the operators derived from it.

A complex is a vertex embedding ``V`` plus cell lists ``EV``, ``FV``, ``CV``
holding sorted 0-based vertex indices.  Signed face boundaries are carried
separately (``face_boundary``) because a vertex list alone does not say how
a face with holes or repeated vertices is traversed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .chains import (
    SignedChain,
    SignedOperator,
    UnsignedMatrix,
    filter_entries,
    unsigned_product,
)
from .errors import (
    DegenerateEdge,
    DimensionMismatch,
    IndexOutOfRange,
    NonPlanarFace,
    OpenChain,
    ValidationError,
)


def canonical(cell: Sequence[int]) -> tuple[int, ...]:
    return tuple(sorted(set(int(k) for k in cell)))


@dataclass
class GeometricComplex:
    """Vertex embedding plus per-dimension cell lists (0-based, sorted)."""

    dim: int
    V: np.ndarray
    EV: list = field(default_factory=list)
    FV: list = field(default_factory=list)
    CV: list = field(default_factory=list)
    face_boundary: SignedOperator | None = None

    def __post_init__(self):
        self.V = np.asarray(self.V, dtype=np.float64).reshape(-1, self.dim) if len(self.V) else np.zeros((0, self.dim))
        self.EV = [tuple(int(k) for k in e) for e in self.EV]
        self.FV = [canonical(f) for f in self.FV]
        self.CV = [canonical(c) for c in self.CV]
        self._d1 = None
        self._edge_index = None

    @property
    def n_verts(self) -> int:
        return int(self.V.shape[0])

    def validate(self) -> None:
        n = self.n_verts
        if self.dim not in (2, 3):
            raise ValidationError(f"ambient dimension {self.dim} not supported")
        for p, cells in ((1, self.EV), (2, self.FV), (3, self.CV)):
            seen = set()
            for cell in cells:
                if any(k < 0 or k >= n for k in cell):
                    raise IndexOutOfRange(f"{p}-cell {cell} refers to a missing vertex")
                key = canonical(cell)
                if key in seen:
                    raise ValidationError(f"duplicate {p}-cell {key}")
                seen.add(key)
        for e in self.EV:
            if len(e) != 2 or e[0] == e[1]:
                raise DegenerateEdge(f"edge {e} does not join two distinct vertices")

    def edge_index(self) -> dict[tuple[int, int], int]:
        if self._edge_index is None:
            self._edge_index = {(min(a, b), max(a, b)): k for k, (a, b) in enumerate(self.EV)}
        return self._edge_index

    def boundary_1(self) -> SignedOperator:
        if self._d1 is None:
            self._d1 = signed_boundary_1(self.EV, self.n_verts)
        return self._d1

    def boundary_2(self) -> SignedOperator:
        if self.face_boundary is None:
            self.face_boundary = signed_boundary_2(self.FV, self.EV, self.V)
        return self.face_boundary


@dataclass
class ChainComplexResult:
    """Bases and boundary operators of an arrangement.

    ``boundary[p]`` is the matrix of the boundary map on p-chains.  The top
    operator covers bounded cells only; ``outer`` is the boundary of the
    unbounded cell, so appending it gives the augmented operator.
    """

    dim: int
    V: np.ndarray
    cells: dict
    boundary: dict
    outer: SignedChain
    timings: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)

    @property
    def EV(self):
        return self.cells.get(1, [])

    @property
    def FV(self):
        return self.cells.get(2, [])

    @property
    def CV(self):
        return self.cells.get(3, [])

    def counts(self) -> list[int]:
        return [int(self.V.shape[0])] + [len(self.cells.get(p, [])) for p in range(1, self.dim + 1)]

    def augmented_boundary(self) -> SignedOperator:
        from .chains import append_column

        return append_column(self.boundary[self.dim], self.outer)

    def complex(self) -> GeometricComplex:
        return GeometricComplex(
            self.dim,
            self.V,
            self.EV,
            self.FV,
            self.CV if self.dim == 3 else [],
            face_boundary=self.boundary.get(2),
        )


def characteristic_matrix(cells: Sequence[Sequence[int]], n_verts: int) -> UnsignedMatrix:
    return UnsignedMatrix.from_rows(cells, n_verts)


def signed_boundary_1(EV: Sequence[Sequence[int]], n_verts: int | None = None) -> SignedOperator:
    """+1 at the higher vertex index, -1 at the lower one."""
    if n_verts is None:
        n_verts = 1 + max((max(e) for e in EV), default=-1)
    rows, cols, vals = [], [], []
    for h, e in enumerate(EV):
        if len(e) != 2:
            raise DegenerateEdge(f"edge {h} has {len(e)} vertices")
        a, b = int(e[0]), int(e[1])
        if a == b:
            raise DegenerateEdge(f"edge {h} joins vertex {a} to itself")
        lo, hi = min(a, b), max(a, b)
        if lo < 0 or hi >= n_verts:
            raise IndexOutOfRange(f"edge {h} refers to a missing vertex")
        rows += [lo, hi]
        cols += [h, h]
        vals += [-1, 1]
    return SignedOperator.from_coo((n_verts, len(EV)), list(zip(rows, cols, vals)), grade=1)


def unsigned_boundary_2(FV, EV, n_verts: int | None = None) -> UnsignedMatrix:
    """``filter(M1 M2^t, 2)``: an edge bounds a face when both endpoints are face vertices."""
    if n_verts is None:
        n_verts = 1 + max([max(c) for c in list(FV) + list(EV) if len(c)] or [-1])
    M1 = characteristic_matrix(EV, n_verts)
    M2 = characteristic_matrix(FV, n_verts)
    if M1.shape[1] != M2.shape[1]:
        raise DimensionMismatch("EV and FV over different vertex sets")
    return filter_entries(unsigned_product(M1, M2), 2)


def _walk_loops(edges: Sequence[int], EV, start_dir=None) -> list[list[tuple[int, int]]]:
    """Split an edge set into closed loops; each loop is a list of (edge, sign)."""
    incident: dict[int, list[int]] = {}
    for e in edges:
        a, b = EV[e]
        incident.setdefault(a, []).append(e)
        incident.setdefault(b, []).append(e)
    for v, inc in incident.items():
        if len(inc) % 2:
            raise OpenChain(f"vertex {v} has odd degree {len(inc)} in a face boundary")
    remaining = set(edges)
    loops = []
    for first in sorted(edges):
        if first not in remaining:
            continue
        remaining.discard(first)
        lo, hi = sorted(EV[first])
        loop = [(first, 1)]
        cur = hi
        while cur != lo:
            nxt = next((e for e in sorted(incident[cur]) if e in remaining), None)
            if nxt is None:
                raise OpenChain("face boundary does not close")
            remaining.discard(nxt)
            a, b = sorted(EV[nxt])
            if cur == a:
                loop.append((nxt, 1))
                cur = b
            else:
                loop.append((nxt, -1))
                cur = a
        loops.append(loop)
    return loops


def _loop_vector_area(loop, EV, V) -> np.ndarray:
    P = np.zeros(3)
    for e, s in loop:
        a, b = sorted(EV[e])
        pa = np.zeros(3)
        pb = np.zeros(3)
        pa[: V.shape[1]] = V[a]
        pb[: V.shape[1]] = V[b]
        P += s * np.cross(pa, pb)
    return 0.5 * P


def signed_boundary_2(FV, EV, V=None) -> SignedOperator:
    """Signed face boundaries from vertex lists.

    With planar coordinates faces are oriented counterclockwise (holes
    clockwise).  Otherwise the loop through the lowest-index edge is walked in
    that edge's stored direction and the other loops are oriented opposite to
    it with respect to the face plane.
    """
    unsigned = unsigned_boundary_2(FV, EV, None if V is None else len(V))
    cols = unsigned.transpose()
    EVs = [tuple(sorted(e)) for e in EV]
    Varr = None if V is None else np.asarray(V, dtype=np.float64)
    columns = []
    for j in range(cols.shape[0]):
        edges = [int(k) for k in cols.row(j)]
        if len(edges) < 3:
            raise OpenChain(f"face {j} has fewer than three boundary edges")
        loops = _walk_loops(edges, EVs)
        col: dict[int, int] = {}
        if Varr is not None:
            areas = [_loop_vector_area(l, EVs, Varr) for l in loops]
            main = int(np.argmax([np.linalg.norm(a) for a in areas]))
            if Varr.shape[1] == 2:
                ref = np.array([0.0, 0.0, 1.0])
            else:
                # the loop through the lowest edge keeps its walking direction
                ref = areas[0] if main == 0 else -areas[0]
            for k, loop in enumerate(loops):
                want = 1.0 if k == main else -1.0
                flip = -1 if float(np.dot(areas[k], ref)) * want < 0 else 1
                for e, sg in loop:
                    col[e] = sg * flip
        else:
            for loop in loops:
                for e, sg in loop:
                    col[e] = sg
        columns.append(col)
    return SignedOperator.from_columns(len(EV), columns, grade=2)


def _closed(cycle: SignedChain, op: SignedOperator) -> bool:
    image = op.matrix[:, cycle.indices].astype(np.int64) @ cycle.values.astype(np.int64)
    return not np.any(image)


def _cell_terms(complex: GeometricComplex) -> np.ndarray:
    """Per-(d-1)-cell contributions whose signed sum over a cycle is its measure."""
    V = complex.V
    if complex.dim == 2:
        E = np.asarray(complex.EV, dtype=np.int64).reshape(-1, 2)
        lo, hi = E.min(axis=1), E.max(axis=1)
        return 0.5 * (V[lo, 0] * V[hi, 1] - V[hi, 0] * V[lo, 1])
    from .tgw import face_vector_areas

    d2 = complex.boundary_2()
    A = face_vector_areas(d2, complex.EV, V)
    E = np.asarray(complex.EV, dtype=np.int64).reshape(-1, 2)
    first = d2.matrix.indices[d2.matrix.indptr[:-1].clip(max=max(d2.nnz - 1, 0))]
    P = V[E.min(axis=1)[first]] if d2.nnz else np.zeros((d2.cols, 3))
    return np.einsum("ij,ij->i", P, A) / 3.0


def cycle_measures(op: SignedOperator, complex: GeometricComplex) -> np.ndarray:
    """Signed measure of every column of ``op`` (columns assumed closed)."""
    terms = _cell_terms(complex)
    if len(terms) != op.rows:
        raise DimensionMismatch("operator rows do not match the cells of the complex")
    return np.asarray(op.matrix.T.astype(np.float64) @ terms).ravel()


def signed_measure(cycle: SignedChain, complex: GeometricComplex) -> float:
    """Oriented area (2D) or volume (3D) enclosed by a closed (d-1)-cycle.

    Both are divergence-theorem sums over the cycle's cells, so non-convex
    faces and faces with holes need no triangulation.
    """
    if complex.dim == 2:
        if cycle.size != len(complex.EV):
            raise DimensionMismatch("cycle is not over the edges of the complex")
        op = complex.boundary_1()
    else:
        if cycle.size != len(complex.FV) and cycle.size != complex.boundary_2().cols:
            raise DimensionMismatch("cycle is not over the faces of the complex")
        op = complex.boundary_2()
    if not _closed(cycle, op):
        raise OpenChain("cycle has a nonzero boundary")
    terms = _cell_terms(complex)
    return float(terms[cycle.indices] @ cycle.values.astype(np.float64))


def face_vector_area(complex: GeometricComplex, f: int) -> np.ndarray:
    """Vector area of face ``f`` along its signed boundary (normal times area)."""
    rows, vals = complex.boundary_2().column(f)
    V = complex.V
    lo = np.array([min(complex.EV[r]) for r in rows])
    hi = np.array([max(complex.EV[r]) for r in rows])
    return 0.5 * (vals[:, None] * np.cross(V[lo], V[hi])).sum(axis=0)


def face_plane(points: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Unit normal and centroid of a planar polygon; raises if not planar."""
    c = points.mean(axis=0)
    _, s, vt = np.linalg.svd(points - c)
    n = vt[-1]
    scale = max(1.0, float(np.abs(points).max()))
    if s.size >= 3 and s[-1] > tol * scale * np.sqrt(len(points)):
        raise NonPlanarFace(f"face deviates from its plane by {s[-1]:.3g}")
    if np.linalg.matrix_rank(points - c, tol=tol * scale) < 2:
        raise NonPlanarFace("face vertices are collinear")
    return n, c


def euler_characteristic(result: ChainComplexResult, include_outer: bool = True) -> int:
    counts = result.counts()
    chi = sum((-1) ** p * n for p, n in enumerate(counts))
    if include_outer:
        chi += (-1) ** result.dim
    return int(chi)
