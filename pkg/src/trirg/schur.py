"""Brute-force check of the decimation map via global Schur elimination.

Assemble the full stiffness matrix of a hierarchically subdivided mesh,
eliminate every interior vertex, and compare the surviving 3x3 form on
the root vertices against the single-triangle action of the root shape.
For the cotangent family the two must agree to float accuracy at any
depth; families that are only projectively fixed come back scaled.

Dense symmetric storage throughout: the depth cap keeps N at most 3283,
where numpy's eigh/solve are instant.  Swapping in a sparse backend
would only touch assemble_stiffness and _schur_complement.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .action import ActionFamily, action_matrix
from .errors import NonPositiveA, SingularInterior
from .shape import HalfPlanePoint, cot_from_coords
from .subdivide import HierMesh, build_mesh

# Interior block counts as singular below this fraction of its spectral norm.
PD_EIG_REL = 1e-12


@dataclass(frozen=True)
class StiffnessMatrix:
    """Global quadratic form of a mesh, with its vertex partition.

    ``matrix`` is N x N symmetric, indexed like the mesh's vertex array;
    ``boundary`` lists the retained (root) vertices and ``interior`` the
    ones to eliminate.
    """

    matrix: np.ndarray
    boundary: tuple[int, ...]
    interior: tuple[int, ...]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("stiffness matrix must be square")
        if not np.array_equal(m, m.T):
            raise ValueError("stiffness matrix must be symmetric")
        seen = sorted(self.boundary) + sorted(self.interior)
        if sorted(seen) != list(range(m.shape[0])):
            raise ValueError("boundary/interior must partition the indices")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


def assemble_stiffness(mesh: HierMesh, fam: ActionFamily) -> StiffnessMatrix:
    """Sum each leaf triangle's action matrix into global vertex indices.

    Triangle shapes come from the stored coordinates, not from the
    subdivision words, so this path is independent of the shape-space
    algebra it is used to check.
    """
    n = len(mesh.vertices)
    k = np.zeros((n, n))
    for tri in mesh.triangles:
        x0, x1, x2 = mesh.triangle_coords(tri)
        local = action_matrix(fam, cot_from_coords(x0, x1, x2)).m
        if not np.all(np.isfinite(local)):
            raise NonPositiveA(
                f"family {fam.name!r} is not finite on triangle "
                f"{''.join(map(str, tri.word))!r}")
        idx = np.array(tri.v)
        k[np.ix_(idx, idx)] += local
    return StiffnessMatrix(k, mesh.boundary, mesh.interior)


def _schur_complement(m: np.ndarray, keep: np.ndarray, drop: np.ndarray,
                      context: str) -> tuple[np.ndarray, float]:
    """Eliminate ``drop`` from symmetric ``m``: K_bb - K_bi K_ii^-1 K_ib.

    Also returns ln det of the dropped block.  Raises SingularInterior
    (tagged with ``context``) when that block is not positive definite.
    """
    if drop.size == 0:
        return m[np.ix_(keep, keep)].copy(), 0.0
    kii = m[np.ix_(drop, drop)]
    eigs = np.linalg.eigvalsh(kii)
    if eigs[0] <= PD_EIG_REL * max(abs(eigs[0]), abs(eigs[-1])):
        raise SingularInterior(
            f"{context}: smallest eigenvalue {eigs[0]} of the "
            f"{drop.size}-vertex block is not positive")
    kbb = m[np.ix_(keep, keep)]
    kbi = m[np.ix_(keep, drop)]
    eff = kbb - kbi @ np.linalg.solve(kii, kbi.T)
    # solve() breaks exact symmetry at roundoff level; restore it
    eff = 0.5 * (eff + eff.T)
    sign, logdet = np.linalg.slogdet(kii)
    return eff, logdet


def eliminate_interior(k: StiffnessMatrix) -> tuple[np.ndarray, float]:
    """One-shot elimination of the whole interior block.

    Returns the effective form on the boundary vertices and the ln det
    of the eliminated block.
    """
    return _schur_complement(k.matrix, np.array(k.boundary, dtype=int),
                             np.array(k.interior, dtype=int),
                             "interior block")


def _centroid_blocks(levels: int) -> list[list[int]]:
    """Vertex ids of the centroids added at each subdivision pass.

    Pass s (1-based) adds 3^(s-1) centroids right after the
    3 + (3^(s-1) - 1)/2 vertices that already exist.
    """
    blocks = []
    for s in range(1, levels + 1):
        count = 3 ** (s - 1)
        start = 3 + (count - 1) // 2
        blocks.append(list(range(start, start + count)))
    return blocks


def eliminate_levelwise(k: StiffnessMatrix, levels: int) -> tuple[np.ndarray, float]:
    """Eliminate centroids one subdivision pass at a time, deepest first.

    Block elimination is associative, so this must match
    eliminate_interior; the level-by-level path is the mesh form of
    iterating the decimation map, which makes the agreement worth
    asserting rather than assuming.
    """
    blocks = _centroid_blocks(levels)
    if sorted(x for b in blocks for x in b) != sorted(k.interior):
        raise ValueError("levels does not match the matrix partition")
    active = list(k.boundary) + sorted(k.interior)
    m = k.matrix[np.ix_(active, active)]
    logdet = 0.0
    for depth in range(levels, 0, -1):
        block = set(blocks[depth - 1])
        drop = np.array([p for p, v in enumerate(active) if v in block])
        keep = np.array([p for p, v in enumerate(active) if v not in block])
        m, step_logdet = _schur_complement(m, keep, drop, f"pass {depth}")
        logdet += step_logdet
        active = [v for v in active if v not in block]
    return m, logdet


@dataclass(frozen=True)
class EliminationReport:
    """Multi-level elimination outcome versus the root-shape reference."""

    levels: int
    z: tuple[float, float]
    family: str
    effective: np.ndarray
    reference: np.ndarray
    rel_frobenius: float
    logdet: float
    lambda_estimate: float
    elapsed_ms: float | None

    def to_json_dict(self) -> dict:
        return {
            "levels": self.levels,
            "z": [self.z[0], self.z[1]],
            "family": self.family,
            "rel_frobenius": self.rel_frobenius,
            "logdet": self.logdet,
            "lambda_estimate": self.lambda_estimate,
            "elapsed_ms": self.elapsed_ms,
        }


def verify_hierarchical(z: HalfPlanePoint, levels: int, fam: ActionFamily,
                        timing: bool = False) -> EliminationReport:
    """Assemble, eliminate, and compare against the root triangle's action.

    The mesh sits on (0,0), (1,0), z.  ``rel_frobenius`` is the relative
    Frobenius distance of the effective 3x3 form from
    action_matrix(fam, root shape); ``lambda_estimate`` is the
    least-squares scale relating the two, which exposes projective fixed
    points (it grows like scale^levels).  ``elapsed_ms`` is populated
    only when ``timing`` is set, so default reports are reproducible.
    """
    t0 = time.perf_counter()
    mesh = build_mesh((0.0, 0.0), (1.0, 0.0), (z.re, z.im), levels)
    k = assemble_stiffness(mesh, fam)
    effective, logdet = eliminate_interior(k)
    reference = action_matrix(fam, mesh.root_shape()).m
    ref_sq = float(np.tensordot(reference, reference))
    rel = float(np.linalg.norm(effective - reference) / np.sqrt(ref_sq))
    lam = float(np.tensordot(effective, reference) / ref_sq)
    elapsed = (time.perf_counter() - t0) * 1e3 if timing else None
    return EliminationReport(levels=levels, z=(z.re, z.im), family=fam.name,
                             effective=effective, reference=reference,
                             rel_frobenius=rel, logdet=logdet,
                             lambda_estimate=lam, elapsed_ms=elapsed)
