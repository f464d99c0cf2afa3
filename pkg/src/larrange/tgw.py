"""Topological gift wrapping: minimal (d-1)-cycles from [d_{d-1}] plus geometry.

Every (d-1)-cell of a regular (d-1)-skeleton bounds exactly two of the
sought d-cells, once with each sign.  A cycle grows from a signed seed: at
each hinge of each member the rotation order about the hinge names the
unique neighbour that closes the hinge, and the neighbour's sign is forced
by cancellation.  Repeating from unused (cell, sign) pairs until every
(d-1)-cell has been used twice yields all d-cells, outer cell included.
"""

from __future__ import annotations

import numpy as np

from .chains import SignedChain, SignedOperator
from .errors import DegenerateGeometry, NonManifoldInput, NonTerminating, OpenChain

ANGLE_TOL = 1e-10


class CyclicOrder:
    """Incident (d-1)-cells of a hinge in counterclockwise order about it."""

    __slots__ = ("hinge", "ring", "sign", "_pos")

    def __init__(self, hinge: int, ring: list[int], sign: dict[int, int]):
        self.hinge = hinge
        self.ring = list(ring)
        self.sign = sign
        self._pos = {c: k for k, c in enumerate(self.ring)}

    def next(self, cell: int) -> int:
        return self.ring[(self._pos[cell] + 1) % len(self.ring)]

    def prev(self, cell: int) -> int:
        return self.ring[(self._pos[cell] - 1) % len(self.ring)]

    def __repr__(self):
        return f"CyclicOrder(hinge={self.hinge}, ring={self.ring})"


def _sorted_ring(hinge, cells, angles) -> list[int]:
    angles = np.mod(np.asarray(angles, dtype=np.float64), 2 * np.pi)
    order = np.lexsort((np.asarray(cells), angles))
    ring = [int(cells[k]) for k in order]
    a = angles[order]
    if len(a) > 1:
        gaps = np.diff(np.append(a, a[0] + 2 * np.pi))
        if np.any(gaps < ANGLE_TOL):
            raise DegenerateGeometry(f"two cells around hinge {hinge} share the same angle")
    return ring


def face_vector_areas(d2: SignedOperator, EV, V: np.ndarray) -> np.ndarray:
    """Vector area of every column of a signed edge-face operator."""
    coo = d2.matrix.tocoo()
    EV = np.asarray(EV, dtype=np.int64).reshape(-1, 2)
    lo = EV.min(axis=1)[coo.row]
    hi = EV.max(axis=1)[coo.row]
    # per-face reference point keeps the cross products well conditioned
    first = d2.matrix.indices[d2.matrix.indptr[:-1].clip(max=max(d2.nnz - 1, 0))]
    ref = V[EV.min(axis=1)[first]] if d2.nnz else np.zeros((d2.cols, 3))
    P = V[lo] - ref[coo.col]
    Q = V[hi] - ref[coo.col]
    contrib = coo.data[:, None].astype(np.float64) * np.cross(P, Q)
    A = np.zeros((d2.cols, 3))
    np.add.at(A, coo.col, contrib)
    return 0.5 * A


def _perp_frame(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    k = int(np.argmin(np.abs(a)))
    t = np.zeros(3)
    t[k] = 1.0
    r = np.cross(a, t)
    r /= np.linalg.norm(r)
    return r, np.cross(a, r)


def cyclic_order(hinge: int, incident, complex, d: int, boundary: SignedOperator | None = None,
                 areas: np.ndarray | None = None) -> CyclicOrder:
    """Rotation order of the (d-1)-cells around one (d-2)-cell.

    ``incident`` maps each incident cell to its coefficient in the hinge row
    of ``boundary``.  For d=2 the hinge is a vertex and edges are ordered by
    the polar angle of their far endpoint.  For d=3 the hinge is an edge with
    axis from its lower to its higher vertex; each face contributes the
    direction pointing from the edge into the face, which is
    ``s * (n_f x axis)`` for a face of vector area ``n_f`` meeting the edge
    with sign ``s``.
    """
    cells = sorted(incident)
    V = complex.V
    if d == 2:
        p = V[hinge]
        angles = []
        for e in cells:
            a, b = complex.EV[e]
            q = V[b if a == hinge else a]
            angles.append(np.arctan2(q[1] - p[1], q[0] - p[0]))
    elif d == 3:
        lo, hi = sorted(complex.EV[hinge])
        axis = V[hi] - V[lo]
        axis = axis / np.linalg.norm(axis)
        r, b = _perp_frame(axis)
        if areas is None:
            areas = face_vector_areas(boundary if boundary is not None else complex.boundary_2(), complex.EV, V)
        angles = []
        for f in cells:
            w = incident[f] * np.cross(areas[f], axis)
            angles.append(np.arctan2(w @ b, w @ r))
    else:
        raise ValueError(f"unsupported dimension {d}")
    ring = _sorted_ring(hinge, cells, angles)
    return CyclicOrder(hinge, ring, {int(c): int(incident[c]) for c in cells})


def all_orders(boundary: SignedOperator, complex, d: int) -> list[CyclicOrder | None]:
    csr = boundary.matrix.tocsr()
    areas = face_vector_areas(boundary, complex.EV, complex.V) if d == 3 else None
    orders = []
    for h in range(boundary.rows):
        cols = csr.indices[csr.indptr[h]:csr.indptr[h + 1]]
        vals = csr.data[csr.indptr[h]:csr.indptr[h + 1]]
        if len(cols) == 0:
            orders.append(None)
            continue
        orders.append(cyclic_order(h, dict(zip(cols.tolist(), vals.tolist())), complex, d, areas=areas))
    return orders


def extract_cycle(seed: int, sign: int, boundary: SignedOperator, orders, trace: list | None = None) -> dict[int, int]:
    """Grow the minimal cycle through ``sign * seed`` by corolla rounds.

    Each round visits every (member, hinge) pair not yet visited; the
    neighbour across the hinge enters with the sign that cancels the hinge.
    """
    c = {int(seed): int(sign)}
    frontier = [int(seed)]
    while frontier:
        new: dict[int, int] = {}
        for pivot in frontier:
            hinges, vals = boundary.column(pivot)
            for tau, b in zip(hinges.tolist(), vals.tolist()):
                s = c[pivot] * b
                order = orders[tau]
                adj = order.next(pivot) if s > 0 else order.prev(pivot)
                if adj == pivot:
                    raise NonManifoldInput(f"cell {pivot} dangles at hinge {tau}")
                coef = -s * order.sign[adj]
                have = c.get(adj, new.get(adj))
                if have is None:
                    new[adj] = coef
                elif have != coef:
                    raise NonManifoldInput(f"cell {adj} reached with both orientations")
        c.update(new)
        if trace is not None and new:
            trace.append(dict(sorted(new.items())))
        frontier = sorted(new)
    return c


def lowest_first(candidates: list[int], used: list[set]) -> tuple[int, int]:
    cell = candidates[0]
    return cell, (1 if 1 not in used[cell] else -1)


def random_policy(rng):
    """Choose policy picking a random open cell and a random unused sign."""

    def choose(candidates, used):
        cell = int(candidates[rng.integers(len(candidates))])
        free = [s for s in (1, -1) if s not in used[cell]]
        return cell, int(free[rng.integers(len(free))])

    return choose


def tgw(boundary: SignedOperator, complex, d: int, choose=None, trace: list | None = None) -> SignedOperator:
    """Columns are all minimal (d-1)-cycles of the skeleton, outer cycles included."""
    n = boundary.cols
    orders = all_orders(boundary, complex, d)
    used: list[set] = [set() for _ in range(n)]
    columns: list[dict[int, int]] = []
    total = 0
    lowest = 0
    for _ in range(2 * n + 1):
        if total == 2 * n:
            break
        if choose is None:
            while lowest < n and len(used[lowest]) == 2:
                lowest += 1
            if lowest == n:
                raise NonTerminating("no admissible seed left")
            cell, sign = lowest_first([lowest], used)
        else:
            candidates = [k for k in range(n) if len(used[k]) < 2]
            if not candidates:
                raise NonTerminating("no admissible seed left")
            cell, sign = choose(candidates, used)
        rounds = [] if trace is not None else None
        c = extract_cycle(cell, sign, boundary, orders, rounds)
        for k, v in c.items():
            if v in used[k]:
                raise NonManifoldInput(f"cell {k} used twice with sign {v:+d}")
            used[k].add(v)
        total += len(c)
        columns.append(c)
        if trace is not None:
            trace.append({"seed": (cell, sign), "rounds": rounds, "cycle": c})
    else:
        raise NonTerminating("marks did not reach twice the cell count")
    op = SignedOperator.from_columns(n, columns, grade=d)
    image = boundary.matrix.astype(np.int64) @ op.matrix.astype(np.int64)
    if image.count_nonzero():
        raise OpenChain("extracted column is not a cycle")
    return op


def cycle_chain(column: dict[int, int], size: int, dim: int) -> SignedChain:
    return SignedChain.from_dict(dim, size, column)
