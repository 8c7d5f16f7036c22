"""Centroid subdivision: the shape semigroup, random flows, and meshes.

Connecting the centroid to the three vertices splits a triangle into
three children of equal area.  On shape space the children are
``CENTER @ ROTATE**k`` applied to the parent, k = 0, 1, 2, where child k
is the sub-triangle opposite parent vertex k and the centroid angle is
component 0 of the child shape.  A subdivision word is the sequence of
child picks, oldest first; its matrix is composed exactly in rational
arithmetic and applied to the root shape once.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import DegenerateTriangle, DepthExceeded
from .shape import (CENTER, DEGENERATE_AREA_REL, IDENTITY, ROTATE,
                    CotangentVector, GroupElement, apply_group,
                    cot_from_coords, flatness)

MAX_LEVELS = 8

CHILDREN: tuple[GroupElement, GroupElement, GroupElement] = (
    CENTER,
    CENTER @ ROTATE,
    CENTER @ ROTATE @ ROTATE,
)

SubdivisionWord = tuple[int, ...]


def subdivide_shape(a: CotangentVector) -> tuple[CotangentVector, ...]:
    """Shapes of the three centroid children of ``a`` (opposite vertex k)."""
    return tuple(apply_group(g, a) for g in CHILDREN)


def word_element(word: SubdivisionWord) -> GroupElement:
    """Exact matrix of a subdivision word (letters applied oldest first)."""
    g = IDENTITY
    for letter in word:
        if letter not in (0, 1, 2):
            raise ValueError(f"word letter {letter!r} not in {{0, 1, 2}}")
        g = CHILDREN[letter] @ g
    return g


def run_word(word: SubdivisionWord, a: CotangentVector) -> CotangentVector:
    """Apply a whole subdivision word to a shape in one exact product."""
    return apply_group(word_element(word), a)


@dataclass(frozen=True)
class MeshTriangle:
    """One (leaf) triangle: vertex ids in marked order, depth, and word."""

    v: tuple[int, int, int]
    level: int
    word: SubdivisionWord


@dataclass(frozen=True)
class HierMesh:
    """Triangulation from ``levels`` rounds of centroid subdivision.

    ``vertices`` rows are 2-D points; the first three are the root corners
    (the boundary), every later one is the centroid of some intermediate
    triangle, appended level by level in child order.  ``triangles`` holds
    the 3**levels leaves only.
    """

    vertices: np.ndarray
    triangles: tuple[MeshTriangle, ...]
    boundary: tuple[int, int, int]
    interior: tuple[int, ...]
    levels: int

    def triangle_coords(self, t: MeshTriangle) -> tuple:
        i, j, k = t.v
        return (self.vertices[i], self.vertices[j], self.vertices[k])

    def root_shape(self) -> CotangentVector:
        i, j, k = self.boundary
        return cot_from_coords(self.vertices[i], self.vertices[j],
                               self.vertices[k])

    def to_json_dict(self) -> dict:
        return {
            "vertices": [[float(x), float(y)] for x, y in self.vertices],
            "triangles": [
                {"v": list(t.v), "level": t.level,
                 "word": "".join(str(c) for c in t.word)}
                for t in self.triangles
            ],
            "boundary": list(self.boundary),
            "interior": list(self.interior),
        }


def _signed_area(p, q, r) -> float:
    return 0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))


def build_mesh(x0, x1, x2, levels: int, max_levels: int = MAX_LEVELS) -> HierMesh:
    """Subdivide the triangle (x0, x1, x2) ``levels`` times at centroids.

    The root is normalized to positive orientation by swapping x1 and x2
    if needed, so every triangle in the mesh is positively oriented.
    """
    if levels < 0:
        raise ValueError("levels must be non-negative")
    if levels > max_levels:
        raise DepthExceeded(f"levels {levels} exceeds cap {max_levels}")
    pts = [np.asarray(p, dtype=float) for p in (x0, x1, x2)]
    area = _signed_area(*pts)
    perim = sum(np.hypot(*(pts[i] - pts[(i + 1) % 3])) for i in range(3))
    if abs(area) < DEGENERATE_AREA_REL * perim * perim:
        raise DegenerateTriangle(f"root triangle area {area:.3e} is degenerate")
    if area < 0.0:
        pts[1], pts[2] = pts[2], pts[1]

    vertices = list(pts)
    tris = [MeshTriangle((0, 1, 2), 0, ())]
    for _ in range(levels):
        next_tris = []
        for t in tris:
            i, j, k = t.v
            c = len(vertices)
            vertices.append((vertices[i] + vertices[j] + vertices[k]) / 3.0)
            next_tris.append(MeshTriangle((c, j, k), t.level + 1, t.word + (0,)))
            next_tris.append(MeshTriangle((c, k, i), t.level + 1, t.word + (1,)))
            next_tris.append(MeshTriangle((c, i, j), t.level + 1, t.word + (2,)))
        tris = next_tris

    return HierMesh(
        vertices=np.array(vertices),
        triangles=tuple(tris),
        boundary=(0, 1, 2),
        interior=tuple(range(3, len(vertices))),
        levels=levels,
    )


def mesh_shape_audit(mesh: HierMesh) -> float:
    """Largest gap between geometric and word-predicted leaf shapes.

    For every leaf triangle the shape computed from its coordinates is
    compared component-wise against the subdivision word applied to the
    root shape; the two must agree up to accumulated rounding.
    """
    root = mesh.root_shape()
    worst = 0.0
    for t in mesh.triangles:
        geo = cot_from_coords(*mesh.triangle_coords(t))
        alg = run_word(t.word, root)
        worst = max(worst, max(abs(g - w) for g, w in
                               zip(geo.astuple(), alg.astuple())))
    return worst


@dataclass(frozen=True)
class FlowStats:
    """Flatness statistics across samples after ``step`` subdivisions."""

    step: int
    samples: int
    fmin: float
    q50: float
    fmax: float
    mean_log_flatness: float

    CSV_HEADER = "step,samples,min,q50,max,mean_log_flatness"

    def csv_row(self) -> str:
        return ",".join([str(self.step), str(self.samples)] +
                        [repr(v) for v in (self.fmin, self.q50, self.fmax,
                                           self.mean_log_flatness)])


def _flow_sample(a: CotangentVector, steps: int, seed: int, index: int) -> list[float]:
    gen = rng.stream(seed, index)
    out = [flatness(a)]
    cur = a
    for _ in range(steps):
        cur = apply_group(CHILDREN[rng.pick_child(gen)], cur)
        out.append(flatness(cur))
    return out


def random_flow(a: CotangentVector, steps: int, samples: int, seed: int,
                workers: int = 1) -> list[FlowStats]:
    """Track flatness along ``samples`` uniform-random subdivision paths.

    Each sample picks one of the three children with probability 1/3 at
    every step (matching the equal-area split), on its own (seed, sample)
    stream, so the output is a pure function of the arguments and does
    not depend on ``workers``.  Returns one row per step, step 0 first.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if samples < 1:
        raise ValueError("samples must be positive")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda s: _flow_sample(a, steps, seed, s),
                                 range(samples)))
    else:
        rows = [_flow_sample(a, steps, seed, s) for s in range(samples)]
    flat = np.array(rows)  # (samples, steps + 1)
    stats = []
    for step in range(steps + 1):
        col = flat[:, step]
        stats.append(FlowStats(
            step=step,
            samples=samples,
            fmin=float(col.min()),
            q50=float(np.median(col)),
            fmax=float(col.max()),
            mean_log_flatness=float(np.mean(np.log(col))),
        ))
    return stats


def flow_csv(stats: list[FlowStats], config_lines: list[str] | None = None) -> str:
    """Serialize flow statistics to CSV, optionally with # config lines."""
    lines = [f"# {line}" for line in (config_lines or [])]
    lines.append(FlowStats.CSV_HEADER)
    lines.extend(s.csv_row() for s in stats)
    return "\n".join(lines) + "\n"
