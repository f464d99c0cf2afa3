"""Small geometric kernels: orientation predicate, snapping, point location."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import PointOnBoundary, ToleranceCollision

_ORIENT_ERRBOUND = 3.3306690738754716e-16


def orient2d(a, b, c) -> int:
    """Sign of the signed area of triangle abc (+1 counterclockwise).

    A floating-point evaluation is trusted when it clears a forward error
    bound; otherwise the determinant is recomputed exactly with rationals.
    """
    l = (a[0] - c[0]) * (b[1] - c[1])
    r = (a[1] - c[1]) * (b[0] - c[0])
    det = l - r
    if abs(det) > _ORIENT_ERRBOUND * (abs(l) + abs(r)):
        return 1 if det > 0 else -1
    ax, ay, bx, by, cx, cy = (Fraction(float(t)) for t in (a[0], a[1], b[0], b[1], c[0], c[1]))
    exact = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    return (exact > 0) - (exact < 0)


def cluster_points(P: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Group points closer than ``eps`` (transitively) and snap each group to its centroid.

    Returns (labels, centroids).  Labels follow the first occurrence of each
    group, so the result depends only on the input order.
    """
    P = np.asarray(P, dtype=np.float64)
    n = len(P)
    if n == 0:
        return np.zeros(0, dtype=np.int64), P.copy()
    pairs = cKDTree(P).query_pairs(eps, output_type="ndarray")
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, raw = connected_components(graph, directed=False)
    _, first = np.unique(raw, return_index=True)
    order = np.argsort(first)
    relabel = np.empty_like(order)
    relabel[raw[first[order]]] = np.arange(len(order))
    labels = relabel[raw]
    k = len(order)
    centroids = np.zeros((k, P.shape[1]))
    np.add.at(centroids, labels, P)
    centroids /= np.bincount(labels, minlength=k)[:, None]
    return labels.astype(np.int64), centroids


def check_separation(C: np.ndarray, eps: float) -> None:
    """Snapped points must stay farther apart than ``eps``."""
    if len(C) > 1 and len(cKDTree(C).query_pairs(eps)):
        raise ToleranceCollision("snapped vertices closer than the tolerance; refine eps")


def point_segment_distance(p, a, b) -> float:
    p, a, b = (np.asarray(x, dtype=np.float64) for x in (p, a, b))
    d = b - a
    L = float(d @ d)
    t = 0.0 if L == 0.0 else min(1.0, max(0.0, float((p - a) @ d) / L))
    return float(np.linalg.norm(p - (a + t * d)))


def segment_parameter(p, a, b) -> float:
    d = np.asarray(b, dtype=np.float64) - a
    return float((np.asarray(p) - a) @ d / (d @ d))


def point_in_polygon(p, segments: np.ndarray, tol: float = 0.0) -> bool:
    """Ray-crossing parity of ``p`` against a set of 2D segments (n x 2 x 2).

    Works for any closed edge set, so holes need no special treatment.
    """
    S = np.asarray(segments, dtype=np.float64).reshape(-1, 2, 2)
    x, y = float(p[0]), float(p[1])
    if tol > 0:
        for a, b in S:
            if point_segment_distance(p, a, b) <= tol:
                raise PointOnBoundary(f"point {tuple(p)} lies on the boundary")
    inside = False
    for a, b in S:
        y1, y2 = a[1], b[1]
        if (y1 > y) != (y2 > y):
            lo, hi = (a, b) if y1 < y2 else (b, a)
            # crossing to the right of p  <=>  p is left of the upward edge
            if orient2d(lo, hi, (x, y)) > 0:
                inside = not inside
    return inside


def interior_point(cycle: list[tuple[int, int]], EV, V: np.ndarray) -> np.ndarray:
    """A point strictly inside the region bounded by a positively oriented 2D cycle.

    The region lies to the left of every oriented edge, so the point is taken
    just left of the midpoint of the longest edge, at half the clearance to the
    remaining edges.
    """
    segs = []
    for e, s in cycle:
        a, b = sorted(EV[e])
        segs.append((V[a], V[b]) if s > 0 else (V[b], V[a]))
    lengths = [np.linalg.norm(b - a) for a, b in segs]
    k = int(np.argmax(lengths))
    a, b = segs[k]
    m = 0.5 * (a + b)
    d = (b - a) / lengths[k]
    left = np.array([-d[1], d[0]])
    clearance = 0.5 * lengths[k]
    for i, (p, q) in enumerate(segs):
        if i != k:
            clearance = min(clearance, _ray_hit(m, left, p, q), point_segment_distance(m, p, q) * 2.0)
    return m + 0.5 * clearance * left


def _ray_hit(o, d, p, q) -> float:
    """Distance along ray o + t d to segment pq (inf if missed)."""
    e = q - p
    den = d[0] * (-e[1]) + d[1] * e[0]
    if abs(den) < 1e-300:
        return np.inf
    w = p - o
    t = (w[0] * (-e[1]) + w[1] * e[0]) / den
    u = (d[0] * w[1] - d[1] * w[0]) / den
    if t > 0 and -1e-12 <= u <= 1 + 1e-12:
        return float(t)
    return np.inf
