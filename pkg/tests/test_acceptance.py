"""End-to-end acceptance checks; each prints one PASS/FAIL line."""

import itertools
import time

import numpy as np
import pytest

from conftest import BOUNDARY_EV, BOUNDARY_FV, BOUNDARY_V, D1_GOLDEN, D2_GOLDEN, HOLE_EV, HOLE_FV, closed_checks
from larrange import scenes, shells
from larrange.chains import (
    SignedChain,
    SignedOperator,
    UnsignedMatrix,
    apply_operator,
    filter_entries,
    transpose,
    unsigned_product,
)
from larrange.errors import CoefficientOverflow, EmptyArrangement
from larrange.lar import GeometricComplex, characteristic_matrix, euler_characteristic, signed_boundary_1, signed_boundary_2
from larrange.pipeline import arrangement3d
from larrange.planar import arrangement2d, biconnected_blocks, biconnected_filter, intersect_segments
from larrange.tgw import all_orders, extract_cycle, lowest_first, random_policy, tgw

from test_planar import brute_articulation, brute_blocks, random_graph
from test_shells import brute_reduction, nested_squares_2d, outer_shells
from test_tgw import canonical_columns


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
        return ok

    return emit


@pytest.fixture(scope="module")
def random_runs():
    """Run the randomized 2D and 3D scenes once, recording every wrapping output."""
    wrapped = []
    real_tgw = shells.tgw

    def recording_tgw(boundary, complex, d, choose=None, trace=None):
        op = real_tgw(boundary, complex, d, choose=choose, trace=trace)
        wrapped.append((op.nnz, boundary.cols))
        return op

    results, empty = [], 0
    with pytest.MonkeyPatch.context() as mp:
        mp.setattr(shells, "tgw", recording_tgw)
        rng = np.random.default_rng(20240)
        for _ in range(100):
            n = int(rng.integers(10, 201))
            try:
                results.append(arrangement2d(scenes.random_segments(n, rng)))
            except EmptyArrangement:
                empty += 1
        for seed in range(20):
            r3 = np.random.default_rng(seed)
            results.append(arrangement3d(scenes.random_solids_scene(r3, int(r3.integers(2, 6)))))
    return results, wrapped, empty


def test_criterion_1_golden_matrices(report):
    t0 = time.perf_counter()
    d1 = signed_boundary_1(BOUNDARY_EV, 6)
    d2 = signed_boundary_2(BOUNDARY_FV, BOUNDARY_EV, BOUNDARY_V)
    hole = filter_entries(unsigned_product(characteristic_matrix(HOLE_EV, 8), characteristic_matrix(HOLE_FV, 8)), 2)
    bd = apply_operator(d1, SignedChain.from_dense(1, [0, 1, -1, 0, 1, 0, 0, 0]))
    cobd = apply_operator(transpose(d2), SignedChain.unit(1, 8, 4))
    elapsed = time.perf_counter() - t0
    checks = [
        np.array_equal(d1.toarray(), D1_GOLDEN),
        np.array_equal(d2.toarray(), D2_GOLDEN),
        np.array_equal(hole.toarray(), np.array([[1, 0]] * 4 + [[1, 1]] * 4)),
        bd.to_dense().tolist() == [-1, 0, 0, 0, 1, 0],
        cobd.to_dense().tolist() == [0, -1, 1],
        elapsed < 1.0,
    ]
    ok = report(1, all(checks), f"checks={checks} time={elapsed:.3f}s")
    assert ok


def test_criterion_2_seeded_trace(report, plane_complex):
    d1 = plane_complex.boundary_1()
    cycle = extract_cycle(11, 1, d1, all_orders(d1, plane_complex, 2))
    labelled = {k + 1: v for k, v in cycle.items()}
    ok = report(2, labelled == {10: 1, 12: 1, 17: -1, 7: -1, 8: 1}, f"cycle={dict(sorted(labelled.items()))}")
    assert ok


def test_criterion_3_dd_zero(report, random_runs):
    results, _, empty = random_runs
    dd = [closed_checks(r)[0] for r in results]
    n2 = sum(r.dim == 2 for r in results)
    ok = report(3, all(dd), f"{sum(dd)}/{len(dd)} outputs with dd=0 ({n2} planar, {len(dd) - n2} spatial, {empty} planar scenes empty)")
    assert ok


def test_criterion_4_generator_count(report, random_runs):
    results, wrapped, _ = random_runs
    per_run = [nnz == 2 * n for nnz, n in wrapped]
    global_ok = [closed_checks(r)[1] for r in results]
    ok = report(4, all(per_run) and all(global_ok),
                f"{sum(per_run)}/{len(per_run)} wrapping outputs, {sum(global_ok)}/{len(global_ok)} assembled outputs")
    assert ok


def test_criterion_5_planar_euler(report):
    bad, slowest, runs = [], 0.0, 0
    for n in (50, 100, 200):
        for seed in range(20):
            t0 = time.perf_counter()
            r = arrangement2d(scenes.random_segments(n, np.random.default_rng(seed)))
            dt = time.perf_counter() - t0
            slowest = max(slowest, dt)
            runs += 1
            chi = euler_characteristic(r)
            if chi != 2 or dt >= 10:
                bad.append((n, seed, chi, r.stats["components"], round(dt, 2)))
    ok = report(5, not bad, f"{runs - len(bad)}/{runs} runs with chi=2, slowest {slowest:.2f}s; failures (n, seed, chi, components, s)={bad}")
    assert ok


def test_criterion_6_merged_grids_euler(report):
    bad, slowest = [], 0.0
    for seed in range(20):
        t0 = time.perf_counter()
        r = arrangement3d(scenes.merged_grids_scene(np.random.default_rng(seed)))
        dt = time.perf_counter() - t0
        slowest = max(slowest, dt)
        if euler_characteristic(r) != 0 or dt >= 60:
            bad.append((seed, euler_characteristic(r), round(dt, 2)))
    ok = report(6, not bad, f"{20 - len(bad)}/20 seeds with chi=0, slowest {slowest:.2f}s; failures={bad}")
    assert ok


def test_criterion_7_incompatible_diagonals(report):
    r = arrangement3d([scenes.kuhn_cube(), scenes.kuhn_cube(reflect_y=True, origin=(1, 0, 0))])
    on_plane = [f for f in r.FV if np.allclose(r.V[list(f), 0], 1.0)]
    triangles = all(len(f) == 3 for f in on_plane)
    ok = report(7, len(on_plane) == 4 and triangles, f"{len(on_plane)} faces on x=1, all triangles={triangles}")
    assert ok


def test_criterion_8_storage_bound(report):
    cx = scenes.cube()
    total = cx.boundary_1().nnz + cx.boundary_2().nnz
    ok = report(8, total == 4 * len(cx.EV) == 48, f"nnz(d2)+nnz(d1)={total}, 4#E={4 * len(cx.EV)}")
    assert ok


def test_criterion_9_seed_policy_uniqueness(report, plane_complex):
    inputs = [(plane_complex, 2), (scenes.cube_grid(2), 3), (scenes.kuhn_cube(), 3)]
    g = intersect_segments(np.random.default_rng(3).random((40, 2, 2)), 1e-9)
    inputs += [(GeometricComplex(2, b.V, b.EV), 2) for b in biconnected_filter(g)]
    same = []
    for k, (cx, d) in enumerate(inputs):
        op = cx.boundary_1() if d == 2 else cx.boundary_2()
        ref = canonical_columns(tgw(op, cx, d, choose=lowest_first))
        alt = canonical_columns(tgw(op, cx, d, choose=random_policy(np.random.default_rng(k))))
        same.append(ref == alt)
    ok = report(9, all(same), f"{sum(same)}/{len(same)} inputs give identical signed column sets")
    assert ok


def test_criterion_10_oracles(report):
    rng = np.random.default_rng(10)
    algebra = 0
    for _ in range(1000):
        m, n, p = (int(x) for x in rng.integers(1, 12, size=3))
        A = (rng.random((m, n)) < 0.4).astype(np.int64)
        B = (rng.random((p, n)) < 0.4).astype(np.int64)
        prod_ok = np.array_equal(unsigned_product(UnsignedMatrix.from_dense(A), UnsignedMatrix.from_dense(B)).toarray(), A @ B.T)
        S = rng.integers(-1, 2, size=(m, n)) * (rng.random((m, n)) < 0.4)
        c = rng.integers(-1, 2, size=n)
        dense = S @ c
        try:
            got = apply_operator(SignedOperator.from_dense(S), SignedChain.from_dense(1, c)).to_dense()
            apply_ok = np.array_equal(got, dense)
        except CoefficientOverflow:
            apply_ok = np.abs(dense).max() > 1
        algebra += prod_ok and apply_ok

    graphs = 0
    grng = np.random.default_rng(11)
    for _ in range(200):
        nv, EV = random_graph(grng)
        blocks, cut = biconnected_blocks(nv, EV)
        label = {k: i for i, b in enumerate(blocks) for k in b}
        same = brute_blocks(nv, EV)
        match = cut == brute_articulation(nv, EV) and all(
            (label[e] == label[f]) == same(e, f) for e, f in itertools.combinations(range(len(EV)), 2))
        kept = sorted(e for b in biconnected_filter_graph(nv, EV) for e in b)
        brute_kept = sorted(EV[e] for e in range(len(EV)) if any(same(e, f) for f in range(len(EV)) if f != e))
        graphs += match and kept == brute_kept

    nestings = 0
    nrng = np.random.default_rng(12)
    for _ in range(30):
        k = int(nrng.integers(1, 7))
        sides = sorted(nrng.choice(np.arange(2, 40, 2), size=k, replace=False).tolist(), reverse=True)
        cx = nested_squares_2d([float(s) for s in sides])
        forest = shells.containment_forest(outer_shells(cx, 2), cx)
        R = [[j < i for j in range(k)] for i in range(k)]
        nestings += forest.relation.tolist() == R and forest.reduced_arcs == brute_reduction(R)

    ok = report(10, algebra == 1000 and graphs == 200 and nestings == 30,
                f"algebra {algebra}/1000, graphs {graphs}/200, nestings {nestings}/30")
    assert ok


def biconnected_filter_graph(nv, EV):
    from larrange.planar import PlanarGraph

    return [b.EV for b in biconnected_filter(PlanarGraph(np.zeros((nv, 2)), EV))]
