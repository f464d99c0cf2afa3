"""Command-line entry point.

    arrange --dim 2 --input segs.json --output result.json --report-euler --check
    arrange convert cube.obj --from obj --to lar-json --output cube.json
    arrange gen --kind grids --seed 3 --output scene.json
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import io, scenes
from .errors import ArrangementError, ParseError, UnsupportedFormat, ValidationError
from .lar import euler_characteristic
from .pipeline import run_arrangement
from .planar import default_eps

EXIT_OK, EXIT_CHECK, EXIT_PARSE, EXIT_INVALID = 0, 1, 2, 3


@dataclass
class PipelineConfig:
    dim: int
    input: str
    output: str | None = None
    eps: float = 1e-8
    report_euler: bool = False
    check: bool = False
    export_mm: str | None = None
    threads: int = 1

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValidationError(f"--dim must be 2 or 3, got {self.dim}")
        if not self.eps > 0:
            raise ValidationError("--eps must be positive")


def validity_checks(result) -> dict[str, bool]:
    checks = {}
    d = result.dim
    for p in range(2, d + 1):
        prod = result.boundary[p - 1].matrix.astype(np.int64) @ result.boundary[p].matrix.astype(np.int64)
        checks[f"dd_{p}"] = prod.count_nonzero() == 0
    n_lower = len(result.cells[d - 1]) if d > 1 else 0
    checks["eq1"] = result.augmented_boundary().nnz == 2 * n_lower
    return checks


def run_arrange(config: PipelineConfig):
    """Run the pipeline; returns (result, report dict)."""
    if config.dim == 2:
        data = io.read_segments(config.input)
        points = data.reshape(-1, 2)
    else:
        data = io.read_complexes(config.input)
        points = np.concatenate([cx.V for cx in data])
    eps = config.eps * (default_eps(points, 1.0) or 1.0)
    result = run_arrangement(data, config.dim, eps, config.threads)
    counts = result.counts()
    report = {
        "counts": counts,
        "bounded_cells": counts[-1],
        "chi": euler_characteristic(result, include_outer=True),
        "chi_without_outer": euler_characteristic(result, include_outer=False),
        "checks": validity_checks(result),
        "timings": {k: round(v, 6) for k, v in result.timings.items()},
    }
    if config.output:
        io.write_result(result, config.output)
    if config.export_mm:
        io.export_matrix_market(result, config.export_mm)
    return result, report


def _arrange_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arrange", description="Chain complex of a 2D or 3D arrangement.")
    p.add_argument("--dim", type=int, required=True, choices=(2, 3))
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--eps", type=float, default=1e-8, help="snap tolerance relative to the bounding-box diagonal")
    p.add_argument("--report-euler", action="store_true")
    p.add_argument("--check", action="store_true", help="fail unless dd=0 and the generator count hold")
    p.add_argument("--export-mm", metavar="DIR")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=0, help="unused by arrange; accepted for symmetry with gen")
    return p


def _convert_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arrange convert")
    p.add_argument("input")
    p.add_argument("--from", dest="src", required=True)
    p.add_argument("--to", dest="dst", required=True)
    p.add_argument("--output", required=True)
    return p


def _gen_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arrange gen", description="Write a randomized test scene.")
    p.add_argument("--kind", choices=("segments", "grids", "solids"), default="segments")
    p.add_argument("--n", type=int, default=100, help="segment count, or solid count for 'solids'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    return p


def gen(kind: str, n: int, seed: int, output: str) -> None:
    rng = np.random.default_rng(seed)
    if kind == "segments":
        obj = scenes.random_segments(n, rng).reshape(-1, 4).tolist()
    elif kind == "grids":
        obj = [io.complex_to_dict(cx) for cx in scenes.merged_grids_scene(rng)]
    else:
        obj = [io.complex_to_dict(cx) for cx in scenes.random_solids_scene(rng, n)]
    with open(output, "w") as fh:
        json.dump(obj, fh)
        fh.write("\n")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    level = os.environ.get("ARRANGE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    try:
        if argv and argv[0] == "convert":
            a = _convert_parser().parse_args(argv[1:])
            for path in io.convert(a.input, a.src, a.dst, a.output):
                print(path)
            return EXIT_OK
        if argv and argv[0] == "gen":
            a = _gen_parser().parse_args(argv[1:])
            gen(a.kind, a.n, a.seed, a.output)
            return EXIT_OK
        a = _arrange_parser().parse_args(argv)
        config = PipelineConfig(a.dim, a.input, a.output, a.eps, a.report_euler, a.check, a.export_mm, a.threads)
        result, report = run_arrange(config)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except UnsupportedFormat as exc:
        print(f"unsupported format: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ArrangementError as exc:
        print(f"invalid input: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    shown = {k: report[k] for k in ("counts", "bounded_cells", "checks")}
    if config.report_euler:
        shown["chi"] = report["chi"]
        shown["chi_without_outer"] = report["chi_without_outer"]
    shown["timings"] = report["timings"]
    print(json.dumps(shown, sort_keys=True))
    if config.check and not all(report["checks"].values()):
        return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
