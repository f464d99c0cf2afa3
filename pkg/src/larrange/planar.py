"""Arrangements of line segments in the plane."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import EmptyArrangement
from .geometry import cluster_points, orient2d, point_segment_distance
from .lar import ChainComplexResult, GeometricComplex
from .shells import assemble, split_components, wrap_component
from .spatial import IntervalTree

log = logging.getLogger(__name__)


@dataclass
class PlanarGraph:
    V: np.ndarray
    EV: list

    @property
    def n_verts(self) -> int:
        return len(self.V)


def default_eps(points: np.ndarray, rel: float = 1e-8) -> float:
    P = np.asarray(points, dtype=np.float64).reshape(-1, np.shape(points)[-1])
    if len(P) == 0:
        return rel
    diag = float(np.linalg.norm(P.max(axis=0) - P.min(axis=0)))
    return rel * diag if diag > 0 else rel


def validate_segments(segments, eps: float) -> tuple[np.ndarray, int]:
    """Drop zero-length segments and exact duplicates; returns (segments, dropped)."""
    S = np.asarray(segments, dtype=np.float64).reshape(-1, 2, 2)
    keep = []
    seen = set()
    for a, b in S:
        if np.linalg.norm(b - a) <= eps:
            continue
        key = tuple(sorted((tuple(a), tuple(b))))
        if key in seen:
            continue
        seen.add(key)
        keep.append(key)
    dropped = len(S) - len(keep)
    if dropped:
        log.info("dropped %d zero-length or duplicate segments", dropped)
    return np.array(keep, dtype=np.float64).reshape(-1, 2, 2), dropped


def _candidate_pairs(S: np.ndarray, eps: float, method: str) -> list[tuple[int, int]]:
    lo = S.min(axis=1) - eps
    hi = S.max(axis=1) + eps
    n = len(S)
    pairs = []
    if method == "brute":
        for i in range(n):
            ok = np.all((lo[i + 1:] <= hi[i]) & (hi[i + 1:] >= lo[i]), axis=1)
            pairs.extend((i, i + 1 + int(k)) for k in np.flatnonzero(ok))
    elif method == "sweep":
        tree = IntervalTree(lo[:, 0], hi[:, 0])
        for i in range(n):
            for j in tree.query(lo[i, 0], hi[i, 0]):
                if j > i and lo[j, 1] <= hi[i, 1] and hi[j, 1] >= lo[i, 1]:
                    pairs.append((i, int(j)))
    else:
        raise ValueError(f"unknown method {method!r}")
    return sorted(pairs)


def _cross(u, v) -> float:
    return float(u[0] * v[1] - u[1] * v[0])


def intersect_segments(segments, eps: float, method: str = "sweep") -> PlanarGraph:
    """Split segments at all mutual intersections and snap nearby points together.

    Touching endpoints, T-junctions and collinear overlaps are detected by
    distance; proper crossings by the orientation predicate.
    """
    S = np.asarray(segments, dtype=np.float64).reshape(-1, 2, 2)
    n = len(S)
    cuts: list[list[np.ndarray]] = [[S[i, 0], S[i, 1]] for i in range(n)]
    for i, j in _candidate_pairs(S, eps, method):
        a, b = S[i]
        c, d = S[j]
        for p in (c, d):
            if point_segment_distance(p, a, b) <= eps:
                cuts[i].append(p)
        for p in (a, b):
            if point_segment_distance(p, c, d) <= eps:
                cuts[j].append(p)
        o1, o2 = orient2d(a, b, c), orient2d(a, b, d)
        o3, o4 = orient2d(c, d, a), orient2d(c, d, b)
        if o1 * o2 < 0 and o3 * o4 < 0:
            t = _cross(c - a, d - c) / _cross(b - a, d - c)
            x = a + t * (b - a)
            cuts[i].append(x)
            cuts[j].append(x)
    P = np.array([p for c in cuts for p in c]).reshape(-1, 2)
    labels, C = cluster_points(P, eps)
    # lexicographic vertex numbering makes the output independent of input order
    order = np.lexsort((C[:, 1], C[:, 0]))
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    labels = rank[labels]
    C = C[order]
    edges = set()
    start = 0
    for i in range(n):
        k = len(cuts[i])
        lab = labels[start:start + k]
        a, b = S[i]
        d = b - a
        t = (P[start:start + k] - a) @ d / (d @ d)
        start += k
        seq = []
        for _, l in sorted(zip(t.tolist(), lab.tolist())):
            if not seq or seq[-1] != l:
                seq.append(l)
        for u, v in zip(seq, seq[1:]):
            if u != v:
                edges.add((min(u, v), max(u, v)))
    return PlanarGraph(C, sorted(edges))


def biconnected_blocks(n_verts: int, EV) -> tuple[list[list[int]], set[int]]:
    """Hopcroft-Tarjan: edge sets of all blocks (bridges included) and articulation vertices."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n_verts)]
    for k, (a, b) in enumerate(EV):
        adj[a].append((b, k))
        adj[b].append((a, k))
    disc = [-1] * n_verts
    low = [0] * n_verts
    blocks: list[list[int]] = []
    cut: set[int] = set()
    timer = 0
    for root in range(n_verts):
        if disc[root] != -1 or not adj[root]:
            continue
        disc[root] = low[root] = timer
        timer += 1
        children = 0
        estack: list[int] = []
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            v, via, it = stack[-1]
            advanced = False
            for w, k in it:
                if k == via:
                    continue
                if disc[w] == -1:
                    estack.append(k)
                    disc[w] = low[w] = timer
                    timer += 1
                    stack.append((w, k, iter(adj[w])))
                    if v == root:
                        children += 1
                    advanced = True
                    break
                if disc[w] < disc[v]:
                    estack.append(k)
                    low[v] = min(low[v], disc[w])
            if advanced:
                continue
            stack.pop()
            if stack:
                u = stack[-1][0]
                low[u] = min(low[u], low[v])
                if low[v] >= disc[u]:
                    if u != root:
                        cut.add(u)
                    block = []
                    while True:
                        k = estack.pop()
                        block.append(k)
                        if k == via:
                            break
                    blocks.append(sorted(block))
        if children > 1:
            cut.add(root)
    return blocks, cut


def biconnected_filter(g: PlanarGraph) -> list[PlanarGraph]:
    """Maximal 2-connected subgraphs; bridges and pendant trees are discarded."""
    blocks, _ = biconnected_blocks(g.n_verts, g.EV)
    out = []
    for block in sorted(blocks):
        if len(block) < 2:
            continue
        out.append(PlanarGraph(g.V, [g.EV[k] for k in block]))
    return out


def _compact(V: np.ndarray, EV) -> tuple[np.ndarray, list]:
    used = sorted({v for e in EV for v in e})
    remap = {v: k for k, v in enumerate(used)}
    return V[used], sorted((remap[a], remap[b]) for a, b in EV)


def arrangement2d(segments, eps: float | None = None, method: str = "sweep") -> ChainComplexResult:
    """Chain complex of the arrangement induced by a set of plane segments."""
    S = np.asarray(segments, dtype=np.float64).reshape(-1, 2, 2)
    if eps is None:
        eps = default_eps(S.reshape(-1, 2))
    S, dropped = validate_segments(S, eps)
    g = intersect_segments(S, eps, method)
    kept = sorted({tuple(e) for b in biconnected_filter(g) for e in b.EV})
    if not kept:
        raise EmptyArrangement("no closed region is formed by the segments")
    V, EV = _compact(g.V, kept)
    cx = GeometricComplex(2, V, EV)
    comps = [wrap_component(c, 2) for c in split_components(cx.boundary_1(), cx, 2)]
    result = assemble(comps, cx, 2, tol=eps)
    result.stats.update(dropped=dropped, components=len(comps), eps=eps)
    return result
