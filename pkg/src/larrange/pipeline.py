"""End-to-end 3D arrangement: fragment, glue, wrap, nest, assemble."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

import numpy as np

from .errors import EmptyArrangement
from .fragment import faces_from_complex, fragment_face
from .congruence import quotient_complex, regularize
from .lar import ChainComplexResult, GeometricComplex
from .planar import arrangement2d, default_eps
from .shells import assemble, split_components, wrap_component
from .spatial import SpatialIndex

log = logging.getLogger(__name__)

STAGES = (
    "Input", "Indexing", "Decomposition", "Congruence", "Connection", "Bases",
    "Boundaries", "Containment", "Reduction", "Adjoining", "Assembling", "Output",
)


@contextmanager
def _stage(timings: dict, name: str):
    t0 = time.perf_counter()
    yield
    timings[name] = timings.get(name, 0.0) + time.perf_counter() - t0
    log.debug("stage %s: %.4fs", name, timings[name])


def arrangement3d(complexes, eps: float | None = None, threads: int = 1) -> ChainComplexResult:
    """Chain complex of the space arrangement induced by a collection of 2-complexes.

    Each input needs vertex coordinates, ``EV`` and ``FV`` (or explicit signed
    face boundaries).  Solids are read through their boundary faces only.
    """
    timings: dict[str, float] = {}
    if isinstance(complexes, GeometricComplex):
        complexes = [complexes]
    with _stage(timings, "Input"):
        faces = [f for cx in complexes for f in faces_from_complex(cx)]
        if not faces:
            raise EmptyArrangement("no input faces")
        if eps is None:
            eps = default_eps(np.concatenate([cx.V for cx in complexes]))
    with _stage(timings, "Indexing"):
        index = SpatialIndex.from_point_sets([f.points for f in faces], pad=eps)
        near = [index.potential_intersections(i) for i in range(len(faces))]
    with _stage(timings, "Decomposition"):
        work = lambda i: fragment_face(i, faces, near[i], eps)  # noqa: E731
        if threads > 1:
            with ThreadPoolExecutor(threads) as pool:
                fragments = list(pool.map(work, range(len(faces))))
        else:
            fragments = [work(i) for i in range(len(faces))]
    with _stage(timings, "Congruence"):
        glued, _, _, qmap = quotient_complex(fragments, eps)
        cx = regularize(glued)
        if not cx.FV:
            raise EmptyArrangement("no closed surface survives regularization")
    with _stage(timings, "Connection"):
        comps = split_components(cx.boundary_2(), cx, 3)
    with _stage(timings, "Bases"):
        comps = [wrap_component(c, 3) for c in comps]
    with _stage(timings, "Boundaries"):
        cx.boundary_1()
    result = assemble(comps, cx, 3, tol=eps, timings=timings)
    with _stage(timings, "Output"):
        result.timings = {k: timings.get(k, 0.0) for k in STAGES}
        result.stats.update(
            eps=eps,
            components=len(comps),
            input_faces=len(faces),
            fragments=sum(f.boundary_2().cols for f in fragments),
            quotient_sizes=qmap.sizes,
        )
    return result


def run_arrangement(data, dim: int, eps: float | None = None, threads: int = 1) -> ChainComplexResult:
    """Dispatch on dimension: plane segments for d=2, face complexes for d=3."""
    if dim == 2:
        t0 = time.perf_counter()
        result = arrangement2d(data, eps)
        result.timings = {"Total": time.perf_counter() - t0}
        return result
    return arrangement3d(data, eps, threads)
