"""Test-scene generators: segment soups, cubes, tetrahedra and their motions."""

from __future__ import annotations

import itertools

import numpy as np
from scipy.spatial.transform import Rotation

from .lar import GeometricComplex, canonical


def random_segments(n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` segments with endpoints uniform in the unit square."""
    return rng.random((n, 2, 2))


def square_segments(x: float, y: float, side: float = 1.0) -> np.ndarray:
    P = np.array([(x, y), (x + side, y), (x + side, y + side), (x, y + side)], dtype=np.float64)
    return np.stack([P, np.roll(P, -1, axis=0)], axis=1)


def from_faces(V, faces) -> GeometricComplex:
    """Complex from polygon vertex loops; edges are the loop sides, deduplicated."""
    V = np.asarray(V, dtype=np.float64)
    edges = set()
    for loop in faces:
        for a, b in zip(loop, list(loop[1:]) + [loop[0]]):
            edges.add((min(a, b), max(a, b)))
    FV = sorted({canonical(f) for f in faces})
    return GeometricComplex(V.shape[1], V, sorted(edges), FV)


def cube(origin=(0.0, 0.0, 0.0), side: float = 1.0) -> GeometricComplex:
    V = np.array(list(itertools.product((0, 1), repeat=3)), dtype=np.float64) * side + origin
    # vertex k has bits (x, y, z) = k >> 2, (k >> 1) & 1, k & 1
    faces = [[0, 1, 3, 2], [4, 5, 7, 6], [0, 1, 5, 4], [2, 3, 7, 6], [0, 2, 6, 4], [1, 3, 7, 5]]
    return from_faces(V, faces)


def cube_grid(n: int = 2, side: float = 1.0, origin=(0.0, 0.0, 0.0)) -> GeometricComplex:
    """An n x n x n block of unit cubes sharing their common faces."""
    idx = {p: k for k, p in enumerate(itertools.product(range(n + 1), repeat=3))}
    V = np.array(list(idx), dtype=np.float64) * side + origin
    faces = set()
    for i, j, k in itertools.product(range(n), repeat=3):
        for axis in range(3):
            for off in (0, 1):
                base = [i, j, k]
                base[axis] += off
                u, w = [a for a in range(3) if a != axis]
                quad = []
                for du, dw in ((0, 0), (1, 0), (1, 1), (0, 1)):
                    p = list(base)
                    p[u] += du
                    p[w] += dw
                    quad.append(idx[tuple(p)])
                faces.add(tuple(quad))
    uniq = {}
    for q in sorted(faces):
        uniq.setdefault(canonical(q), q)
    return from_faces(V, [list(q) for q in uniq.values()])


def tetrahedron(V=None) -> GeometricComplex:
    if V is None:
        V = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    return from_faces(V, [list(t) for t in itertools.combinations(range(4), 3)])


def kuhn_cube(reflect_y: bool = False, origin=(0.0, 0.0, 0.0)) -> GeometricComplex:
    """Unit cube cut into six tetrahedra around its main diagonal.

    Reflecting in y swaps the diagonals on the faces x=0 and x=1, so two such
    cubes glued along x=1 have incompatible face triangulations.
    """
    corners = list(itertools.product((0, 1), repeat=3))
    idx = {p: k for k, p in enumerate(corners)}
    tris = set()
    for perm in itertools.permutations(range(3)):
        p = [0, 0, 0]
        tet = [idx[tuple(p)]]
        for axis in perm:
            p[axis] = 1
            tet.append(idx[tuple(p)])
        for t in itertools.combinations(tet, 3):
            tris.add(tuple(sorted(t)))
    V = np.array(corners, dtype=np.float64)
    if reflect_y:
        V[:, 1] = 1.0 - V[:, 1]
    return from_faces(V + origin, [list(t) for t in sorted(tris)])


def transform(cx: GeometricComplex, R=None, t=None, scale: float = 1.0, center=None) -> GeometricComplex:
    R = np.eye(3) if R is None else np.asarray(R, dtype=np.float64)
    t = np.zeros(3) if t is None else np.asarray(t, dtype=np.float64)
    c = cx.V.mean(axis=0) if center is None else np.asarray(center, dtype=np.float64)
    V = (cx.V - c) @ R.T * scale + c + t
    return GeometricComplex(3, V, cx.EV, cx.FV)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    return Rotation.random(random_state=rng).as_matrix()


def merged_grids_scene(rng: np.random.Generator, n: int = 2) -> list[GeometricComplex]:
    """Two n x n x n cube blocks; the second under a random rotation and a shift."""
    A = cube_grid(n)
    R = random_rotation(rng)
    t = np.array([rng.uniform(0.2, 0.8) * n, rng.uniform(0.2, 0.8) * n, rng.uniform(0.15, 0.85)])
    B = transform(cube_grid(n), R, t)
    return [A, B]


def random_solids_scene(rng: np.random.Generator, k: int) -> list[GeometricComplex]:
    """``k`` unit cubes or tetrahedra under random rigid motions and scales, overlapping."""
    out = []
    for _ in range(k):
        base = cube() if rng.random() < 0.5 else tetrahedron()
        R = random_rotation(rng)
        t = rng.uniform(-0.4, 0.4, size=3)
        out.append(transform(base, R, t, scale=rng.uniform(0.7, 1.3), center=base.V.mean(axis=0)))
    return out
