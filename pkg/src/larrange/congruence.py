"""Gluing independently fragmented faces into one complex.

Vertices closer than the tolerance are merged, edges and faces with equal
canonical forms are identified, and face boundaries are rewritten over the
merged edges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .chains import SignedOperator
from .errors import CoefficientOverflow
from .geometry import check_separation, cluster_points
from .lar import GeometricComplex, signed_boundary_1


@dataclass
class QuotientMap:
    vertex: np.ndarray      # concatenated fragment vertex -> merged vertex
    edge: list              # concatenated fragment edge -> [(merged edge, sign), ...]
    face: np.ndarray        # concatenated fragment face -> merged face (-1 if dropped)
    face_sign: np.ndarray   # +1 / -1 relative orientation of the kept representative
    sizes: tuple


def _split_at_vertices(V: np.ndarray, EV: list, eps: float) -> dict[int, list[int]]:
    """Vertices lying strictly inside each edge (T-junctions), sorted along the edge."""
    tree = cKDTree(V)
    out = {}
    for k, (a, b) in enumerate(EV):
        pa, pb = V[a], V[b]
        d = pb - pa
        L = float(np.linalg.norm(d))
        cand = tree.query_ball_point(0.5 * (pa + pb), 0.5 * L + eps)
        inner = []
        for v in cand:
            if v in (a, b):
                continue
            t = float((V[v] - pa) @ d) / (L * L)
            if eps / L < t < 1 - eps / L and np.linalg.norm(pa + t * d - V[v]) <= eps:
                inner.append((t, v))
        if inner:
            out[k] = [v for _, v in sorted(inner)]
    return out


def quotient_complex(fragments: list[GeometricComplex], eps: float):
    """Merge fragments into one complex; returns (complex, d1, d2, QuotientMap)."""
    dim = fragments[0].dim if fragments else 3
    Vs = [f.V for f in fragments]
    V_all = np.concatenate(Vs) if Vs else np.zeros((0, dim))
    labels, C = cluster_points(V_all, eps)
    check_separation(C, eps)
    voff = np.cumsum([0] + [len(v) for v in Vs])

    edge_id: dict[tuple[int, int], int] = {}
    EV: list[tuple[int, int]] = []
    raw_edges = []   # per concatenated edge: (merged lo, merged hi, sign of lo->hi vs fragment direction)
    for fi, frag in enumerate(fragments):
        for a, b in frag.EV:
            u, v = int(labels[voff[fi] + a]), int(labels[voff[fi] + b])
            if u == v:
                raw_edges.append(None)
                continue
            key = (min(u, v), max(u, v))
            if key not in edge_id:
                edge_id[key] = len(EV)
                EV.append(key)
            # fragment edges run from their lower to higher local index
            raw_edges.append((edge_id[key], 1 if u < v else -1))

    splits = _split_at_vertices(C, EV, eps)
    pieces: dict[int, list[tuple[int, int]]] = {}
    for k, inner in splits.items():
        a, b = EV[k]
        chain = [a] + inner + [b]
        seq = []
        for u, v in zip(chain, chain[1:]):
            key = (min(u, v), max(u, v))
            if key not in edge_id:
                edge_id[key] = len(EV)
                EV.append(key)
            seq.append((edge_id[key], 1 if u < v else -1))
        pieces[k] = seq
    # retire split edges and renumber the survivors
    alive = [k for k in range(len(EV)) if k not in pieces]
    renum = {k: i for i, k in enumerate(alive)}

    def expand(k: int) -> list[tuple[int, int]]:
        if k in pieces:
            return [(renum[e], s) for e, s in pieces[k]]
        return [(renum[k], 1)]

    edge_map = []
    for item in raw_edges:
        if item is None:
            edge_map.append([])
        else:
            e, s = item
            edge_map.append([(ne, s * t) for ne, t in expand(e)])
    EV_final = [EV[k] for k in alive]

    columns = []
    seen: dict[tuple[int, ...], int] = {}
    face_map = []
    face_sign = []
    eoff = 0
    for frag in fragments:
        d2 = frag.boundary_2()
        for j in range(d2.cols):
            col: dict[int, int] = {}
            for e, s in d2.column_dict(j).items():
                for ne, t in edge_map[eoff + e]:
                    col[ne] = col.get(ne, 0) + s * t
            col = {k: v for k, v in col.items() if v}
            if any(abs(v) > 1 for v in col.values()):
                raise CoefficientOverflow("face boundary folds onto itself after snapping")
            if len(col) < 3:
                face_map.append(-1)
                face_sign.append(0)
                continue
            key = tuple(sorted(col))
            if key in seen:
                # the earlier (lower-index) face keeps its orientation
                ref = columns[seen[key]]
                k0 = key[0]
                face_map.append(seen[key])
                face_sign.append(1 if ref[k0] == col[k0] else -1)
                continue
            seen[key] = len(columns)
            face_map.append(len(columns))
            face_sign.append(1)
            columns.append(col)
        eoff += len(frag.EV)

    d1 = signed_boundary_1(EV_final, len(C))
    d2 = SignedOperator.from_columns(len(EV_final), columns, grade=2)
    FV = [tuple(sorted({v for e in col for v in EV_final[e]})) for col in columns]
    cx = GeometricComplex(dim, C, EV_final, FV, face_boundary=d2)
    qmap = QuotientMap(labels, edge_map, np.array(face_map), np.array(face_sign), (len(C), len(EV_final), len(columns)))
    return cx, d1, d2, qmap


def regularize(cx: GeometricComplex) -> GeometricComplex:
    """Drop faces with a free edge (repeatedly), then unused edges and vertices."""
    d2 = cx.boundary_2()
    alive = np.ones(d2.cols, dtype=bool)
    csr = d2.matrix.tocsr()
    while True:
        deg = np.asarray(abs(csr[:, np.flatnonzero(alive)]).sum(axis=1)).ravel() if alive.any() else np.zeros(d2.rows)
        free = np.flatnonzero(deg == 1)
        if len(free) == 0:
            break
        bad = np.unique(d2.matrix.tocsr()[free].indices)
        alive[bad] = False
    faces = np.flatnonzero(alive)
    sub = d2.matrix[:, faces]
    used_e = np.flatnonzero(np.asarray(abs(sub).sum(axis=1)).ravel())
    used_v = sorted({v for e in used_e for v in cx.EV[e]})
    vmap = {v: k for k, v in enumerate(used_v)}
    EV = [tuple(sorted((vmap[a], vmap[b]))) for a, b in (cx.EV[e] for e in used_e)]
    op = SignedOperator(sub[used_e], grade=2)
    FV = [tuple(sorted({v for e in op.column(j)[0] for v in EV[e]})) for j in range(op.cols)]
    return GeometricComplex(cx.dim, cx.V[used_v], EV, FV, face_boundary=op)
