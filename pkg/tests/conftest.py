import numpy as np
import pytest

from larrange.lar import GeometricComplex

# Three faces on six vertices: a triangle, a triangle and a quad.
BOUNDARY_V = np.array([(0, 0), (2, 0), (1, 1), (4, 0), (3, 1), (2, 2)], dtype=float)
BOUNDARY_EV = [(0, 1), (0, 2), (1, 2), (1, 3), (1, 4), (2, 5), (3, 4), (4, 5)]
BOUNDARY_FV = [(0, 1, 2), (1, 3, 4), (1, 2, 4, 5)]

D1_GOLDEN = np.array([
    [-1, -1, 0, 0, 0, 0, 0, 0],
    [1, 0, -1, -1, -1, 0, 0, 0],
    [0, 1, 1, 0, 0, -1, 0, 0],
    [0, 0, 0, 1, 0, 0, -1, 0],
    [0, 0, 0, 0, 1, 0, 1, -1],
    [0, 0, 0, 0, 0, 1, 0, 1],
])
D2_GOLDEN = np.array([
    [1, -1, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, -1, 0, 1, 0],
    [0, 0, -1, 0, 1, -1, 0, 1],
]).T

# A square face with a square hole.
HOLE_V = np.array([(0, 0), (3, 3), (1, 2), (2, 1), (3, 0), (1, 1), (0, 3), (2, 2)], dtype=float)
HOLE_FV = [tuple(range(8)), (2, 3, 5, 7)]
HOLE_EV = [(0, 4), (0, 6), (1, 4), (1, 6), (2, 5), (2, 7), (3, 5), (3, 7)]

# Planar graph with several faces and an inner cluster.
PLANE_V = np.array([(-3, -3), (-3, 0), (-3, 2), (-3, 5), (0, 5), (5, 5), (5, -3), (1, -3), (3, -3),
                   (5, 1), (0, 0), (0, 2), (3, 1), (1, -1), (2, 3)], dtype=float)
PLANE_EV = [(a - 1, b - 1) for a, b in [
    (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 10), (13, 15), (13, 14), (7, 10), (12, 15), (5, 12), (11, 12),
    (4, 12), (3, 11), (2, 11), (1, 11), (11, 14), (7, 9), (8, 9), (1, 8), (6, 15), (7, 13), (8, 14)]]


@pytest.fixture
def boundary_complex():
    return GeometricComplex(2, BOUNDARY_V, BOUNDARY_EV, BOUNDARY_FV)


@pytest.fixture
def plane_complex():
    return GeometricComplex(2, PLANE_V, PLANE_EV)


def closed_checks(result):
    """(dd == 0 for every grade, generator count identity)."""
    d = result.dim
    dd = all(
        (result.boundary[p - 1].matrix.astype(np.int64) @ result.boundary[p].matrix.astype(np.int64)).count_nonzero() == 0
        for p in range(2, d + 1)
    )
    eq1 = result.augmented_boundary().nnz == 2 * len(result.cells[d - 1])
    return dd, eq1
