import itertools

import networkx as nx
import numpy as np
import pytest

from conftest import closed_checks
from larrange import scenes
from larrange.errors import EmptyArrangement
from larrange.geometry import orient2d, point_segment_distance
from larrange.lar import euler_characteristic
from larrange.planar import (
    PlanarGraph,
    arrangement2d,
    biconnected_blocks,
    biconnected_filter,
    intersect_segments,
    validate_segments,
)


def segments_cross(p, q, r, s):
    return orient2d(p, q, r) * orient2d(p, q, s) < 0 and orient2d(r, s, p) * orient2d(r, s, q) < 0


def assert_interior_disjoint(g, tol):
    V = g.V
    for (a, b), (c, d) in itertools.combinations(g.EV, 2):
        shared = {a, b} & {c, d}
        if not shared:
            assert not segments_cross(V[a], V[b], V[c], V[d])
        for x in {c, d} - shared:
            assert point_segment_distance(V[x], V[a], V[b]) > tol
        for x in {a, b} - shared:
            assert point_segment_distance(V[x], V[c], V[d]) > tol


def test_crossing_diagonals():
    g = intersect_segments([[(0, 0), (1, 1)], [(1, 0), (0, 1)]], 1e-9)
    assert len(g.V) == 5 and len(g.EV) == 4
    assert any(np.allclose(v, (0.5, 0.5)) for v in g.V)


def test_long_diagonal_is_cut_by_normal_edge():
    S = np.concatenate([
        scenes.square_segments(0, 0, 2.0),
        [[(1, 0), (1, 2)], [(0, 0), (2, 2)]],
    ])
    g = intersect_segments(S, 1e-9)
    mid = [k for k, v in enumerate(g.V) if np.allclose(v, (1, 1))]
    assert len(mid) == 1
    diag = [e for e in g.EV if mid[0] in e and any(np.allclose(g.V[x], (0, 0)) or np.allclose(g.V[x], (2, 2)) for x in e)]
    assert len(diag) == 2
    r = arrangement2d(S)
    assert r.counts() == [7, 10, 4]


@pytest.mark.parametrize("seed", range(4))
def test_random_segments_interior_disjoint(seed):
    rng = np.random.default_rng(seed)
    g = intersect_segments(rng.random((25, 2, 2)), 1e-9)
    assert_interior_disjoint(g, 1e-10)


@pytest.mark.parametrize("seed", range(4))
def test_sweep_matches_brute_force(seed):
    S = np.random.default_rng(10 + seed).random((40, 2, 2))
    a = intersect_segments(S, 1e-9, method="sweep")
    b = intersect_segments(S, 1e-9, method="brute")
    assert np.array_equal(a.V, b.V) and a.EV == b.EV


def test_collinear_overlap_merges():
    g = intersect_segments([[(0, 0), (2, 0)], [(1, 0), (3, 0)]], 1e-9)
    assert len(g.V) == 4 and len(g.EV) == 3


def test_validation_drops_degenerate_and_duplicates():
    S, dropped = validate_segments([[(0, 0), (1, 0)], [(1, 0), (0, 0)], [(2, 2), (2, 2)]], 1e-9)
    assert len(S) == 1 and dropped == 2


def test_snapping_merges_close_points():
    S = [[(0, 0), (1, 0)], [(1 + 1e-12, 0), (1, 1)]]
    g = intersect_segments(S, 1e-9)
    assert len(g.V) == 3


def test_square_with_pendant():
    V = np.array([(0, 0), (1, 0), (1, 1), (0, 1), (2, 2)], dtype=float)
    g = PlanarGraph(V, [(0, 1), (1, 2), (2, 3), (0, 3), (2, 4)])
    parts = biconnected_filter(g)
    assert len(parts) == 1 and sorted(parts[0].EV) == [(0, 1), (0, 3), (1, 2), (2, 3)]


def test_two_squares_share_articulation():
    EV = [(0, 1), (1, 2), (2, 3), (0, 3), (2, 4), (4, 5), (5, 6), (2, 6)]
    blocks, cut = biconnected_blocks(7, EV)
    assert cut == {2}
    assert len(biconnected_filter(PlanarGraph(np.zeros((7, 2)), EV))) == 2


def _components(n, edges, removed=None):
    alive = [v for v in range(n) if v != removed]
    parent = {v: v for v in alive}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        if removed not in (a, b):
            parent[find(a)] = find(b)
    return {v: find(v) for v in alive}


def brute_articulation(n, EV):
    touched = {v for e in EV for v in e}
    base = _components(n, EV)
    n_base = len({base[v] for v in touched})
    cut = set()
    for v in touched:
        comp = _components(n, EV, v)
        rest = {comp[w] for w in touched if w != v}
        if len(rest) > n_base:
            cut.add(v)
    return cut


def brute_blocks(n, EV):
    """Edges e, f share a block iff no single vertex removal separates them."""
    base = _components(n, EV)
    removals = [_components(n, EV, v) for v in range(n)]

    def same(e, f):
        if base[EV[e][0]] != base[EV[f][0]]:
            return False
        for v, sub in enumerate(removals):
            ends_e = [x for x in EV[e] if x != v]
            ends_f = [x for x in EV[f] if x != v]
            if not any(sub[x] == sub[y] for x in ends_e for y in ends_f):
                return False
        return True

    return same


def random_graph(rng, n_max=20):
    n = int(rng.integers(2, n_max + 1))
    p = rng.uniform(0.05, 0.4)
    EV = [(a, b) for a, b in itertools.combinations(range(n), 2) if rng.random() < p]
    return n, EV


def test_blocks_match_vertex_removal_oracle():
    rng = np.random.default_rng(2024)
    for _ in range(60):
        n, EV = random_graph(rng)
        blocks, cut = biconnected_blocks(n, EV)
        assert cut == brute_articulation(n, EV)
        label = {k: i for i, b in enumerate(blocks) for k in b}
        assert sorted(label) == list(range(len(EV)))
        same = brute_blocks(n, EV)
        for e, f in itertools.combinations(range(len(EV)), 2):
            assert (label[e] == label[f]) == same(e, f)


def test_blocks_match_networkx():
    rng = np.random.default_rng(99)
    for _ in range(100):
        n, EV = random_graph(rng)
        G = nx.Graph(EV)
        ours = {frozenset(map(tuple, (sorted(EV[k]) for k in b))) for b in biconnected_blocks(n, EV)[0]}
        theirs = {frozenset(tuple(sorted(e)) for e in comp) for comp in nx.biconnected_component_edges(G)}
        assert ours == theirs


def test_unit_square_arrangement():
    r = arrangement2d(scenes.square_segments(0, 0))
    assert r.counts() == [4, 4, 1]
    A = r.augmented_boundary().toarray()
    assert not A.sum(axis=1).any()
    assert closed_checks(r) == (True, True)


def test_offset_squares():
    S = np.concatenate([scenes.square_segments(0, 0), scenes.square_segments(0.5, 0.5)])
    r = arrangement2d(S)
    assert r.counts() == [10, 12, 3]
    assert euler_characteristic(r) == 2
    assert closed_checks(r) == (True, True)


def test_empty_arrangement():
    with pytest.raises(EmptyArrangement):
        arrangement2d([[(0, 0), (1, 0)], [(2, 0), (2, 1)]])


@pytest.mark.parametrize("seed", range(3))
def test_random_arrangement_euler(seed):
    r = arrangement2d(np.random.default_rng(seed).random((60, 2, 2)))
    assert closed_checks(r) == (True, True)
    if r.stats["components"] == 1:
        assert euler_characteristic(r) == 2


@pytest.mark.parametrize("seed", range(3))
def test_idempotence(seed):
    r = arrangement2d(np.random.default_rng(seed).random((40, 2, 2)))
    again = arrangement2d(np.array([[r.V[a], r.V[b]] for a, b in r.EV]))
    assert again.counts() == r.counts()
