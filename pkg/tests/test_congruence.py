import itertools

import numpy as np
import pytest
from scipy.spatial import cKDTree

from larrange import scenes
from larrange.chains import SignedOperator
from larrange.congruence import quotient_complex, regularize
from larrange.errors import ToleranceCollision
from larrange.fragment import faces_from_complex, fragment_face
from larrange.geometry import check_separation, cluster_points
from larrange.lar import GeometricComplex
from larrange.spatial import SpatialIndex


def fragments_of(complexes, eps=1e-9):
    faces = [f for cx in complexes for f in faces_from_complex(cx)]
    idx = SpatialIndex.from_point_sets([f.points for f in faces], pad=eps)
    return [fragment_face(k, faces, idx.potential_intersections(k), eps) for k in range(len(faces))]


def triangle(points):
    return GeometricComplex(3, points, [(0, 1), (1, 2), (0, 2)], [(0, 1, 2)])


def test_shared_edge_with_tiny_offset():
    a = triangle([(0, 0, 0), (1, 0, 0), (0, 1, 0)])
    b = triangle([(1 + 1e-12, 0, 0), (0, 1 - 1e-12, 0), (1, 1, 0)])
    cx, d1, d2, qmap = quotient_complex([a, b], 1e-9)
    assert len(cx.V) == 4 and len(cx.EV) == 5 and len(cx.FV) == 2
    assert qmap.sizes == (4, 5, 2)
    assert not (d1.toarray() @ d2.toarray()).any()


def test_two_cubes_sharing_a_face():
    frags = fragments_of([scenes.cube(), scenes.cube(origin=(1, 0, 0))])
    cx, d1, d2, qmap = quotient_complex(frags, 1e-9)
    assert qmap.sizes == (12, 20, 11)
    # the shared face is identified, the second copy maps onto the first
    assert (qmap.face >= 0).all() and len(set(qmap.face.tolist())) == 11


def test_kuhn_pair_crossing_point_once():
    frags = fragments_of([scenes.kuhn_cube(), scenes.kuhn_cube(reflect_y=True, origin=(1, 0, 0))])
    cx, d1, d2, _ = quotient_complex(frags, 1e-9)
    centre = [k for k, v in enumerate(cx.V) if np.allclose(v, (1, 0.5, 0.5))]
    assert len(centre) == 1
    assert not (d1.toarray() @ d2.toarray()).any()


@pytest.mark.parametrize("seed", range(3))
def test_quotient_invariants(seed):
    rng = np.random.default_rng(seed)
    eps = 1e-9
    cx, d1, d2, _ = quotient_complex(fragments_of(scenes.random_solids_scene(rng, 3)), eps)
    assert len(cx.V) < 2 or not cKDTree(cx.V).query_pairs(eps)
    assert len(set(cx.EV)) == len(cx.EV)
    keys = {tuple(sorted(d2.column_dict(j))) for j in range(d2.cols)}
    assert len(keys) == d2.cols
    assert (d1.matrix.astype(np.int64) @ d2.matrix.astype(np.int64)).count_nonzero() == 0


def test_quotient_is_idempotent():
    frags = fragments_of([scenes.cube(), scenes.cube(origin=(0.5, 0.5, 0.5))])
    cx, _, d2, qmap = quotient_complex(frags, 1e-9)
    again, _, d2b, qmap2 = quotient_complex([cx], 1e-9)
    assert qmap2.sizes == qmap.sizes
    assert np.array_equal(again.V, cx.V) and again.EV == cx.EV
    assert d2b == d2


def test_lower_index_face_keeps_orientation():
    a = triangle([(0, 0, 0), (1, 0, 0), (0, 1, 0)])
    b = GeometricComplex(3, a.V, a.EV, a.FV, face_boundary=SignedOperator.from_dense(-a.boundary_2().toarray(), grade=2))
    cx, _, d2, qmap = quotient_complex([a, b], 1e-9)
    assert d2.cols == 1
    assert np.array_equal(d2.toarray(), a.boundary_2().toarray())
    assert qmap.face.tolist() == [0, 0] and qmap.face_sign.tolist() == [1, -1]


def test_ambiguous_snapping_is_reported():
    # two tight pairs whose centroids end up closer than the tolerance
    P = np.array([(-0.49, 0, 0), (0.49, 0, 0), (0, -0.49, 0.75), (0, 0.49, 0.75)])
    assert all(np.linalg.norm(P[p] - P[q]) > 1.0 for p, q in itertools.product((0, 1), (2, 3)))
    labels, C = cluster_points(P, 1.0)
    assert labels.tolist() == [0, 0, 1, 1]
    with pytest.raises(ToleranceCollision):
        check_separation(C, 1.0)


def test_regularize_drops_dangling_face():
    cube = scenes.cube()
    V = np.vstack([cube.V, [(2, 0, 0)]])
    fin = tuple(sorted((4, 5, 8)))
    cx = GeometricComplex(3, V, list(cube.EV) + [(4, 8), (5, 8)], list(cube.FV) + [fin])
    reg = regularize(cx)
    assert len(reg.FV) == 6 and len(reg.EV) == 12 and len(reg.V) == 8
