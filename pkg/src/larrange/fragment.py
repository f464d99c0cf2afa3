"""Independent fragmentation of each input face against the faces near it.

A face is moved onto the plane z=0 by a rigid motion, every nearby face is
sliced by that plane, and the planar arrangement of the resulting segments
is restricted to the face and moved back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPlanarFace
from .geometry import interior_point, point_in_polygon
from .lar import GeometricComplex, face_plane
from .chains import SignedOperator
from .planar import arrangement2d


@dataclass
class AffineMap:
    Q: np.ndarray
    Qinv: np.ndarray

    def apply(self, P: np.ndarray) -> np.ndarray:
        P = np.asarray(P, dtype=np.float64).reshape(-1, 3)
        return P @ self.Q[:3, :3].T + self.Q[:3, 3]

    def invert(self, P: np.ndarray) -> np.ndarray:
        P = np.asarray(P, dtype=np.float64).reshape(-1, 3)
        return P @ self.Qinv[:3, :3].T + self.Qinv[:3, 3]


@dataclass
class Face:
    """One input 2-cell: its vertex coordinates and boundary edges (local indices)."""

    points: np.ndarray
    edges: np.ndarray

    @property
    def segments(self) -> np.ndarray:
        return self.points[self.edges]


def rotation_to_z(n: np.ndarray) -> np.ndarray:
    """Rotation taking unit vector ``n`` onto +z about the axis n x z."""
    z = np.array([0.0, 0.0, 1.0])
    c = float(n @ z)
    v = np.cross(n, z)
    s = float(np.linalg.norm(v))
    if s < 1e-15:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    K = np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])
    return np.eye(3) + K + K @ K * ((1.0 - c) / s**2)


def submanifold_map(points: np.ndarray, tol: float = 1e-9) -> AffineMap:
    """Rigid motion sending the supporting plane of a planar face to z=0.

    The normal is oriented so that its largest component is positive, which
    makes the map a deterministic function of the plane.
    """
    P = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    n, _ = face_plane(P, tol)
    if n[int(np.argmax(np.abs(n)))] < 0:
        n = -n
    R = rotation_to_z(n)
    t = np.array([0.0, 0.0, -float((R @ P[0])[2])])
    Q = np.eye(4)
    Q[:3, :3] = R
    Q[:3, 3] = t
    Qinv = np.eye(4)
    Qinv[:3, :3] = R.T
    Qinv[:3, 3] = -R.T @ t
    amap = AffineMap(Q, Qinv)
    scale = max(1.0, float(np.abs(P).max()))
    if np.abs(amap.apply(P)[:, 2]).max() > tol * scale:
        raise NonPlanarFace("face vertices are not coplanar")
    return amap


def slice_face(points: np.ndarray, edges, eps: float) -> list[tuple[tuple[float, float], tuple[float, float]]]:
    """Segments of a (mapped) face lying on the plane z=0, as 2D segments.

    Vertices within ``eps`` of the plane count as lying on its positive side,
    so every boundary loop crosses the plane an even number of times and
    alternate crossings bound the pieces of the face on the plane.  Boundary
    edges lying in the plane contribute themselves.
    """
    P = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    E = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    z = P[:, 2]
    on = np.abs(z) <= eps
    if on.all():
        return [(tuple(P[a, :2]), tuple(P[b, :2])) for a, b in E]
    out = [(tuple(P[a, :2]), tuple(P[b, :2])) for a, b in E if on[a] and on[b]]
    pos = (z > 0) | on
    crossings = []
    for a, b in E:
        if pos[a] == pos[b]:
            continue
        if on[a]:
            crossings.append(P[a, :2])
        elif on[b]:
            crossings.append(P[b, :2])
        else:
            t = z[a] / (z[a] - z[b])
            crossings.append(P[a, :2] + t * (P[b, :2] - P[a, :2]))
    if crossings:
        # direction of the line where the face plane meets z=0
        seg = P[E[:, 1]] - P[E[:, 0]]
        normal = np.cross(seg[:, None, :], seg[None, :, :]).reshape(-1, 3)
        normal = normal[np.argmax(np.linalg.norm(normal, axis=1))]
        direction = np.cross(normal, [0.0, 0.0, 1.0])[:2]
        X = np.array(crossings)
        order = np.argsort(X @ direction, kind="stable")
        X = X[order]
        for k in range(0, len(X) - 1, 2):
            if np.linalg.norm(X[k + 1] - X[k]) > eps:
                out.append((tuple(X[k]), tuple(X[k + 1])))
    return out


def fragment_face(sigma: int, faces: list[Face], near, eps: float) -> GeometricComplex:
    """Local complex of face ``sigma`` cut by the faces ``near`` (indices into ``faces``)."""
    face = faces[sigma]
    amap = submanifold_map(face.points, tol=max(eps, 1e-9))
    mine = amap.apply(face.points)
    own = mine[:, :2][face.edges]
    segs = [own]
    for tau in sorted(near):
        other = faces[tau]
        cut = slice_face(amap.apply(other.points), other.edges, eps)
        if cut:
            segs.append(np.asarray(cut, dtype=np.float64).reshape(-1, 2, 2))
    local = arrangement2d(np.concatenate(segs), eps)
    d2 = local.boundary[2]
    keep = []
    for j in range(d2.cols):
        col = d2.column_dict(j)
        p = interior_point(sorted(col.items()), local.EV, local.V)
        if point_in_polygon(p, own):
            keep.append(col)
    used_edges = sorted({e for col in keep for e in col})
    emap = {e: k for k, e in enumerate(used_edges)}
    used_verts = sorted({v for e in used_edges for v in local.EV[e]})
    vmap = {v: k for k, v in enumerate(used_verts)}
    EV = [tuple(sorted((vmap[a], vmap[b]))) for a, b in (local.EV[e] for e in used_edges)]
    # vmap is increasing, so edge directions survive the renumbering
    cols = [{emap[e]: v for e, v in col.items()} for col in keep]
    V2 = local.V[used_verts]
    V3 = amap.invert(np.column_stack([V2, np.zeros(len(V2))]))
    FV = [tuple(sorted({v for e in col for v in EV[e]})) for col in cols]
    return GeometricComplex(3, V3, EV, FV, face_boundary=SignedOperator.from_columns(len(EV), cols, grade=2))


def faces_from_complex(cx: GeometricComplex) -> list[Face]:
    d2 = cx.boundary_2()
    out = []
    for f in range(d2.cols):
        rows, _ = d2.column(f)
        E = np.array([sorted(cx.EV[r]) for r in rows])
        verts, inv = np.unique(E, return_inverse=True)
        out.append(Face(cx.V[verts], inv.reshape(-1, 2)))
    return out
