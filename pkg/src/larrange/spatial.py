"""Static centered interval trees and a box index built from three of them."""

from __future__ import annotations

import numpy as np


class IntervalTree:
    """Centered interval tree over closed intervals ``[lo, hi]`` with integer ids."""

    __slots__ = ("center", "by_lo", "by_hi", "left", "right")

    def __init__(self, lo, hi, ids=None):
        lo = np.asarray(lo, dtype=np.float64)
        hi = np.asarray(hi, dtype=np.float64)
        ids = np.arange(len(lo)) if ids is None else np.asarray(ids)
        self.left = self.right = None
        if len(lo) == 0:
            self.center = 0.0
            self.by_lo = self.by_hi = (np.zeros(0), np.zeros(0), ids[:0])
            return
        self.center = float(np.median(np.concatenate([lo, hi])))
        go_left = hi < self.center
        go_right = lo > self.center
        here = ~(go_left | go_right)
        l0, h0, i0 = lo[here], hi[here], ids[here]
        o = np.argsort(l0, kind="stable")
        self.by_lo = (l0[o], h0[o], i0[o])
        o = np.argsort(-h0, kind="stable")
        self.by_hi = (l0[o], h0[o], i0[o])
        if go_left.any():
            self.left = IntervalTree(lo[go_left], hi[go_left], ids[go_left])
        if go_right.any():
            self.right = IntervalTree(lo[go_right], hi[go_right], ids[go_right])

    def query(self, a: float, b: float) -> list:
        """Ids of all intervals intersecting ``[a, b]``."""
        out = []
        stack = [self]
        while stack:
            node = stack.pop()
            if node is None:
                continue
            if b < node.center:
                l0, _, i0 = node.by_lo
                out.extend(i0[: np.searchsorted(l0, b, side="right")].tolist())
                stack.append(node.left)
            elif a > node.center:
                _, h0, i0 = node.by_hi
                out.extend(i0[: np.searchsorted(-h0, -a, side="right")].tolist())
                stack.append(node.right)
            else:
                out.extend(node.by_lo[2].tolist())
                stack.append(node.left)
                stack.append(node.right)
        return out


class SpatialIndex:
    """Axis-aligned boxes indexed by one interval tree per coordinate.

    A query intersects the three per-axis answers, which is exactly the set of
    boxes overlapping the query box.
    """

    def __init__(self, lo: np.ndarray, hi: np.ndarray):
        self.lo = np.asarray(lo, dtype=np.float64)
        self.hi = np.asarray(hi, dtype=np.float64)
        self.trees = [IntervalTree(self.lo[:, k], self.hi[:, k]) for k in range(self.lo.shape[1])]

    @classmethod
    def from_point_sets(cls, point_sets, pad: float = 0.0) -> "SpatialIndex":
        lo = np.array([np.min(P, axis=0) for P in point_sets]) - pad
        hi = np.array([np.max(P, axis=0) for P in point_sets]) + pad
        return cls(lo, hi)

    def query_box(self, lo, hi) -> set:
        result = None
        for k, tree in enumerate(self.trees):
            hits = set(tree.query(lo[k], hi[k]))
            result = hits if result is None else result & hits
            if not result:
                break
        return result or set()

    def potential_intersections(self, i: int) -> set:
        return self.query_box(self.lo[i], self.hi[i]) - {i}
