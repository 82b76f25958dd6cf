"""Gromov delta of finite balls.

All values are exact: a report stores an integer ``numerator`` and the
delta it stands for is ``numerator / (2 * scale)``.  The delta of a finite
ball is evidence about the infinite graph, never a proof.
"""

from __future__ import annotations

import csv
import io
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .complexes import LabeledGraph

EXACT_LIMIT = 400
BASEPOINT_LIMIT = 3000
CAVEAT = "delta of a finite ball; boundary effects mean this is evidence, not a certificate"


class DeltaRefused(ValueError):
    """The graph is too large for the requested exact method."""


@dataclass
class DeltaReport:
    method: str
    numerator: int
    scale: int
    witness: tuple[int, ...]
    n_vertices: int
    exhaustive: bool = True
    meta: dict = field(default_factory=dict)
    caveat: str = CAVEAT

    @property
    def delta(self) -> Fraction:
        return Fraction(self.numerator, 2 * self.scale)

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "delta": str(self.delta),
            "delta_numerator": self.numerator,
            "scale": self.scale,
            "witness": list(self.witness),
            "n_vertices": self.n_vertices,
            "exhaustive": self.exhaustive,
            "meta": self.meta,
            "caveat": self.caveat,
        }


def four_point_defect(D: np.ndarray, quad: Sequence[int]) -> int:
    """Largest minus middle of the three pair sums; twice the Gromov delta of the quadruple."""
    x, y, z, w = quad
    s = sorted((int(D[x, y] + D[z, w]), int(D[x, z] + D[y, w]), int(D[x, w] + D[y, z])))
    return s[2] - s[1]


def _set_threads(threads: int | None):
    if threads:
        import numba

        numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))


def delta_four_point(g: LabeledGraph, mode: str = "exact", *, base: int = 0, threads: int | None = None) -> DeltaReport:
    from ._kernels import four_point_based, four_point_exact

    n = g.n
    if n == 0:
        raise ValueError("empty graph")
    D = np.ascontiguousarray(g.distances(), dtype=np.int64)
    _set_threads(threads)
    meta = {k: g.meta.get(k) for k in ("kind", "r", "R_H", "exact") if k in g.meta}
    if mode == "exact":
        if n > EXACT_LIMIT:
            raise DeltaRefused(f"exact four-point mode is limited to {EXACT_LIMIT} vertices (got {n})")
        if n < 4:
            return DeltaReport("four-point-exact", 0, g.scale, (), n, meta=meta)
        num, arg = four_point_exact(D)
        return DeltaReport("four-point-exact", int(num), g.scale, tuple(int(a) for a in arg), n, meta=meta)
    if mode == "basepoint":
        if n > BASEPOINT_LIMIT:
            raise DeltaRefused(f"basepoint four-point mode is limited to {BASEPOINT_LIMIT} vertices (got {n})")
        meta["note"] = "based at one vertex; the exact value is at most twice this"
        if n < 4:
            return DeltaReport("four-point-basepoint", 0, g.scale, (), n, meta=meta)
        num, arg = four_point_based(D, base)
        return DeltaReport("four-point-basepoint", int(num), g.scale, tuple(int(a) for a in arg), n, meta=meta)
    raise ValueError(f"unknown mode {mode!r}")


def brute_force_delta(D: np.ndarray) -> int:
    """Reference maximum over all ordered quadruples (small graphs only)."""
    n = len(D)
    return max((four_point_defect(D, q) for q in itertools.product(range(n), repeat=4)), default=0)


# --------------------------------------------------------------------------
# slim triangles


def _path_gap(D: np.ndarray, side: list[int], a: list[int], b: list[int]) -> int:
    other = a + b
    return int(D[np.ix_(side, other)].min(axis=1).max())


def triangle_slimness(D: np.ndarray, sides: Sequence[list[int]]) -> int:
    p, q, s = sides
    return max(_path_gap(D, p, q, s), _path_gap(D, q, p, s), _path_gap(D, s, p, q))


def delta_slim(g: LabeledGraph, budget: int = 20000, *, cap: int = 8, seed: int = 0) -> DeltaReport:
    """Max over geodesic triangles of the least delta making every side delta-close to the other two.

    Triangles have vertices of the ball and sides chosen among up to ``cap``
    geodesics each.  Exhaustive when the total number of (triangle, side
    choice) configurations fits in ``budget``; otherwise triangles are
    sampled with ``seed`` until the budget is spent.
    """
    D = g.distances()
    n = g.n
    geo_cache: dict[tuple[int, int], list[list[int]]] = {}
    truncated_geo = False

    def geos(u, v):
        nonlocal truncated_geo
        if (u, v) not in geo_cache:
            paths, trunc = g.all_geodesics(u, v, cap)
            truncated_geo |= trunc
            geo_cache[(u, v)] = paths
        return geo_cache[(u, v)]

    triples = list(itertools.combinations(range(n), 3))
    total = 0
    sizes = []
    for x, y, z in triples:
        c = len(geos(x, y)) * len(geos(y, z)) * len(geos(x, z))
        sizes.append(c)
        total += c
        if total > budget:
            break
    exhaustive = total <= budget
    if exhaustive:
        order = range(len(triples))
    else:
        rng = random.Random(seed)
        order = rng.sample(range(len(triples)), len(triples))
    best, witness, used = 0, (), 0
    for t in order:
        x, y, z = triples[t]
        choices = (geos(x, y), geos(y, z), geos(x, z))
        cost = len(choices[0]) * len(choices[1]) * len(choices[2])
        if not exhaustive and used + cost > budget:
            break
        used += cost
        for sides in itertools.product(*choices):
            v = triangle_slimness(D, sides)
            if v > best:
                best, witness = v, (x, y, z)
    return DeltaReport(
        "slim-sampled" if not exhaustive else "slim-exhaustive",
        2 * best,
        g.scale,
        witness,
        n,
        exhaustive=exhaustive and not truncated_geo,
        meta={"configurations": used, "geodesic_cap": cap, "seed": seed, "geodesics_truncated": truncated_geo},
    )


# --------------------------------------------------------------------------
# series


@dataclass
class DeltaSeries:
    radii: list[int]
    reports: list[DeltaReport]
    verdict: str
    label: str = ""

    def values(self) -> list[Fraction]:
        return [r.delta for r in self.reports]

    def rows(self) -> list[dict]:
        return [
            {
                "series": self.label,
                "radius": r,
                "n_vertices": rep.n_vertices,
                "method": rep.method,
                "delta_numerator": rep.numerator,
                "scale": rep.scale,
                "delta": str(rep.delta),
                "verdict": self.verdict,
            }
            for r, rep in zip(self.radii, self.reports)
        ]


def trend_verdict(values: Sequence) -> str:
    if len(values) < 3:
        return "inconclusive"
    a, b, c = values[-3:]
    if a == b == c:
        return "bounded"
    if a < b < c:
        return "growing"
    return "inconclusive"


def delta_series(
    builder: Callable[[int], LabeledGraph], radii: Sequence[int], mode: str = "exact", *, label: str = "",
    threads: int | None = None,
) -> DeltaSeries:
    radii = list(radii)
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing")
    reports = [delta_four_point(builder(r), mode, threads=threads) for r in radii]
    return DeltaSeries(radii, reports, trend_verdict([rep.delta for rep in reports]), label)


def series_csv(series: Sequence[DeltaSeries], seed: int | None = None) -> str:
    buf = io.StringIO()
    fields = ["series", "radius", "n_vertices", "method", "delta_numerator", "scale", "delta", "verdict"]
    if seed is not None:
        fields.append("seed")
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for s in series:
        for row in s.rows():
            if seed is not None:
                row["seed"] = seed
            w.writerow(row)
    return buf.getvalue()
