"""Quadratic actions on triangle fields and their decimation map.

A permutation-covariant quadratic action is fixed by two functions
``P, Q`` of the shape:

    S(f0, f1, f2 | a) = P(a) f0^2     + Q(a) f1 f2
                      + P(rot a) f1^2 + Q(rot a) f2 f0
                      + P(rot^2 a) f2^2 + Q(rot^2 a) f0 f1

with the swap symmetry P(swap a) = P(a), Q(swap a) = Q(a).  Subdividing
at the centroid, summing the child actions, and integrating out the
Gaussian field at the centroid yields a new pair (P~, Q~) evaluated at
the parent shape; that map is implemented both as closed-form scalar
arithmetic (``rg_step``) and as an explicit matrix pipeline
(``assemble_subdivided`` then ``integrate_out_center``), so each path can
check the other.

Matrix convention used throughout: S(f) = f^T M f with the coefficient of
``fi*fj`` (i != j) split evenly, so ``Q = 2 * M[i, j]``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import rng
from .errors import DegenerateTriangle, NonPositiveA
from .shape import (CENTER, IDENTITY, ROTATE, CotangentVector, HalfPlanePoint,
                    apply_group, cot_from_coords, from_halfplane)

_ROT_POWERS = (IDENTITY, ROTATE, ROTATE @ ROTATE)

# All nine elements rot^i @ CENTER @ rot^j appearing in the decimation.
_CONJ = {(i, j): _ROT_POWERS[i] @ CENTER @ _ROT_POWERS[j]
         for i in range(3) for j in range(3)}


@dataclass(frozen=True)
class ActionFamily:
    """Coefficient functions (P, Q) of a permutation-covariant action."""

    name: str
    P: Callable[[CotangentVector], float]
    Q: Callable[[CotangentVector], float]


def cotangent_family() -> ActionFamily:
    """The finite-element cotangent energy: P = (a1 + a2)/4, Q = -a0/2."""
    return ActionFamily("cotangent",
                        P=lambda a: 0.25 * (a.a1 + a.a2),
                        Q=lambda a: -0.5 * a.a0)


def constant_family(p: float = 0.5, q: float = -0.5) -> ActionFamily:
    """Shape-independent coefficients; only projectively fixed under RG."""
    return ActionFamily("constant", P=lambda a: p, Q=lambda a: q)


@dataclass(frozen=True)
class QuadForm3:
    """Symmetric 3x3 matrix of a quadratic action over one triangle."""

    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        # equal_nan: symmetry is the invariant here, finiteness is not
        if m.shape != (3, 3) or not np.array_equal(m, m.T, equal_nan=True):
            raise ValueError("QuadForm3 needs a symmetric 3x3 matrix")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "m", m)

    def energy(self, f0: float, f1: float, f2: float) -> float:
        f = np.array([f0, f1, f2])
        return float(f @ self.m @ f)


@dataclass(frozen=True)
class RGStepBreakdown:
    """Pieces of the subdivided action grouped by the centroid field.

    The sum of the three child actions is
    ``a_coeff * f3^2 + (b_coeffs . f) * f3 + f^T c_matrix f``; ``log_z``
    is the log of the Gaussian normalization sqrt(3 (a0+a1+a2) / (2 pi)).
    """

    a_coeff: float
    b_coeffs: tuple[float, float, float]
    c_matrix: QuadForm3
    log_z: float


def cotangent_action(a: CotangentVector, f0: float, f1: float, f2: float) -> float:
    """Energy of the linear interpolant, in shape form:

    (1/4) [a0 (f1 - f2)^2 + a1 (f2 - f0)^2 + a2 (f0 - f1)^2].
    """
    return 0.25 * (a.a0 * (f1 - f2) ** 2 +
                   a.a1 * (f2 - f0) ** 2 +
                   a.a2 * (f0 - f1) ** 2)


def barycentric(x, x0, x1, x2) -> tuple[float, float, float]:
    """Area-ratio coordinates of x in the triangle (x0, x1, x2).

    Signed, so the formula extends affinely outside; they sum to 1 and
    reconstruct x exactly.
    """
    def det(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    d = det(x0, x1, x2)
    if d == 0.0:
        raise DegenerateTriangle("barycentric coordinates of a flat triangle")
    u0 = det(x, x1, x2) / d
    u1 = det(x0, x, x2) / d
    u2 = det(x0, x1, x) / d
    return (u0, u1, u2)


def interpolant_energy(x0, x1, x2, f0: float, f1: float, f2: float) -> float:
    """Dirichlet energy of the linear interpolant, from the coordinates.

    Uses the side vectors e1 = x1 - x0, e2 = x2 - x0 and the flat metric
    in the induced coordinates; algebraically equal to cotangent_action
    of the triangle's shape.
    """
    e1 = (x1[0] - x0[0], x1[1] - x0[1])
    e2 = (x2[0] - x0[0], x2[1] - x0[1])
    cross = e1[0] * e2[1] - e1[1] * e2[0]
    if cross == 0.0:
        raise DegenerateTriangle("zero-area triangle has no interpolant energy")
    g11 = e1[0] * e1[0] + e1[1] * e1[1]
    g22 = e2[0] * e2[0] + e2[1] * e2[1]
    g12 = e1[0] * e2[0] + e1[1] * e2[1]
    d1 = f1 - f0
    d2 = f2 - f0
    return 0.25 * (g22 * d1 * d1 - 2.0 * g12 * d1 * d2 + g11 * d2 * d2) / abs(cross)


def quadrature_energy(x0, x1, x2, f0: float, f1: float, f2: float,
                      grid: int = 8, step: float = 1e-5) -> float:
    """Numerical Dirichlet energy: midpoint rule on a barycentric grid.

    The triangle is refined into grid^2 congruent cells; at each cell
    centroid the interpolant's gradient is taken by central differences
    and (1/2)|grad f|^2 is weighted by the cell area.  Independent of the
    closed forms above; exact up to finite-difference roundoff because
    the gradient of a linear interpolant is constant.
    """
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)

    def interp(p):
        u0, u1, u2 = barycentric(p, x0, x1, x2)
        return u0 * f0 + u1 * f1 + u2 * f2

    area = 0.5 * abs((x1[0] - x0[0]) * (x2[1] - x0[1]) -
                     (x1[1] - x0[1]) * (x2[0] - x0[0]))
    cell = area / (grid * grid)
    ex = np.array([step, 0.0])
    ey = np.array([0.0, step])
    total = 0.0
    for i in range(grid):
        for j in range(grid - i):
            # upward cell (i, j) and, when present, its downward partner
            corners = [(i, j), (i + 1, j), (i, j + 1)]
            mids = [np.sum([(x0 * (grid - u - v) + x1 * u + x2 * v) / grid
                            for u, v in corners], axis=0) / 3.0]
            if i + j < grid - 1:
                corners = [(i + 1, j), (i + 1, j + 1), (i, j + 1)]
                mids.append(np.sum([(x0 * (grid - u - v) + x1 * u + x2 * v) / grid
                                    for u, v in corners], axis=0) / 3.0)
            for p in mids:
                gx = (interp(p + ex) - interp(p - ex)) / (2.0 * step)
                gy = (interp(p + ey) - interp(p - ey)) / (2.0 * step)
                total += 0.5 * (gx * gx + gy * gy) * cell
    return total


def action_matrix(fam: ActionFamily, a: CotangentVector) -> QuadForm3:
    """3x3 matrix of the family's action at shape ``a`` (Q split evenly)."""
    ra = apply_group(ROTATE, a)
    rra = apply_group(ROTATE, ra)
    q_12 = fam.Q(a)
    q_20 = fam.Q(ra)
    q_01 = fam.Q(rra)
    return QuadForm3(np.array([
        [fam.P(a), q_01 / 2.0, q_20 / 2.0],
        [q_01 / 2.0, fam.P(ra), q_12 / 2.0],
        [q_20 / 2.0, q_12 / 2.0, fam.P(rra)],
    ]))


def _conjugate_shapes(a: CotangentVector) -> dict[tuple[int, int], CotangentVector]:
    """Shapes rot^i(center(rot^j(a))) for i, j in {0,1,2}."""
    return {key: apply_group(g, a) for key, g in _CONJ.items()}


def assemble_subdivided(fam: ActionFamily, a: CotangentVector) -> RGStepBreakdown:
    """Sum the three child actions, grouped by powers of the centroid field.

    Child triangles carry shapes center(rot^k a) with the centroid first,
    so the child actions are S(f3, f1, f2), S(f3, f2, f0), S(f3, f0, f1)
    at those shapes.  Raises NonPositiveA when the f3^2 coefficient is
    not positive (the Gaussian integral over f3 would diverge).
    """
    s = _conjugate_shapes(a)
    P, Q = fam.P, fam.Q
    a_coeff = P(s[0, 0]) + P(s[0, 1]) + P(s[0, 2])
    if not a_coeff > 0.0:
        raise NonPositiveA(
            f"center coefficient {a_coeff} is not positive for family "
            f"{fam.name!r} at {a}")
    b = (Q(s[1, 1]) + Q(s[2, 2]),
         Q(s[2, 0]) + Q(s[1, 2]),
         Q(s[1, 0]) + Q(s[2, 1]))
    c00 = P(s[2, 1]) + P(s[1, 2])
    c11 = P(s[1, 0]) + P(s[2, 2])
    c22 = P(s[2, 0]) + P(s[1, 1])
    q_12 = Q(s[0, 0])
    q_20 = Q(s[0, 1])
    q_01 = Q(s[0, 2])
    c = QuadForm3(np.array([
        [c00, q_01 / 2.0, q_20 / 2.0],
        [q_01 / 2.0, c11, q_12 / 2.0],
        [q_20 / 2.0, q_12 / 2.0, c22],
    ]))
    log_z = 0.5 * math.log(3.0 * a.total / (2.0 * math.pi))
    return RGStepBreakdown(a_coeff=a_coeff, b_coeffs=b, c_matrix=c, log_z=log_z)


def integrate_out_center(b: RGStepBreakdown) -> QuadForm3:
    """Gaussian-integrate the centroid field: C - B^2 / (4A) as a matrix."""
    if not b.a_coeff > 0.0:
        raise NonPositiveA(f"center coefficient {b.a_coeff} is not positive")
    bb = np.array(b.b_coeffs)
    return QuadForm3(b.c_matrix.m - np.outer(bb, bb) / (4.0 * b.a_coeff))


def rg_step(fam: ActionFamily, a: CotangentVector) -> tuple[float, float]:
    """One decimation step in closed form: (P~, Q~) at shape ``a``.

    Must agree with the (0, 0) entry and twice the (1, 2) entry of the
    assemble -> integrate matrix pipeline.
    """
    s = _conjugate_shapes(a)
    P, Q = fam.P, fam.Q
    denom = P(s[0, 0]) + P(s[0, 1]) + P(s[0, 2])
    if not denom > 0.0:
        raise NonPositiveA(
            f"center coefficient {denom} is not positive for family "
            f"{fam.name!r} at {a}")
    p_new = (P(s[2, 1]) + P(s[1, 2])
             - (Q(s[1, 1]) + Q(s[2, 2])) ** 2 / (4.0 * denom))
    q_new = (Q(s[0, 0])
             - (Q(s[2, 0]) + Q(s[1, 2])) * (Q(s[1, 0]) + Q(s[2, 1]))
             / (2.0 * denom))
    return (p_new, q_new)


# Shapes for residual scans are drawn from this half-plane rectangle;
# it stays clear of degenerate triangles where tolerance policy dominates.
SAMPLE_RECT = ((0.05, 0.95), (0.05, 2.0))


def sample_shape(seed: int, index: int) -> CotangentVector:
    """Shape number ``index`` of the documented random scan for ``seed``."""
    gen = rng.stream(seed, index)
    (re_lo, re_hi), (im_lo, im_hi) = SAMPLE_RECT
    re = rng.uniform_in(gen, re_lo, re_hi)
    im = rng.uniform_in(gen, im_lo, im_hi)
    return from_halfplane(HalfPlanePoint(re, im))


def sample_shapes(n: int, seed: int) -> list[CotangentVector]:
    return [sample_shape(seed, i) for i in range(n)]


@dataclass(frozen=True)
class ResidualReport:
    """Outcome of a randomized fixed-point or projective scan."""

    family: str
    samples: int
    max_residual: float
    lam: float | None
    inadmissible_count: int

    def to_json_dict(self) -> dict:
        # inf (no admissible samples) has no strict-JSON encoding
        finite = math.isfinite(self.max_residual)
        return {
            "family": self.family,
            "samples": self.samples,
            "max_residual": self.max_residual if finite else None,
            "lambda": self.lam,
            "inadmissible_count": self.inadmissible_count,
        }


def _scan(fam: ActionFamily, samples: int, seed: int, workers: int):
    """Evaluate (P, Q, P~, Q~) on the documented random shapes.

    Inadmissible samples (NonPositiveA) come back as None; order is by
    sample index regardless of worker count.
    """
    if samples < 1:
        raise ValueError("samples must be positive")

    def one(i: int):
        a = sample_shape(seed, i)
        try:
            pt, qt = rg_step(fam, a)
        except NonPositiveA:
            return None
        return (fam.P(a), fam.Q(a), pt, qt)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, range(samples)))
    return [one(i) for i in range(samples)]


def fixed_point_residual(fam: ActionFamily, samples: int, seed: int,
                         workers: int = 1) -> ResidualReport:
    """Largest normalized gap between (P~, Q~) and (P, Q) on random shapes.

    Per sample: max(|P~ - P|, |Q~ - Q|) / (1 + |P| + |Q|).  Inadmissible
    shapes are counted and excluded from the max.
    """
    rows = _scan(fam, samples, seed, workers)
    worst = 0.0
    bad = 0
    for row in rows:
        if row is None:
            bad += 1
            continue
        p, q, pt, qt = row
        worst = max(worst, max(abs(pt - p), abs(qt - q)) / (1.0 + abs(p) + abs(q)))
    return ResidualReport(fam.name, samples, worst, None, bad)


def projective_residual(fam: ActionFamily, samples: int, seed: int,
                        workers: int = 1) -> ResidualReport:
    """Fixed-point test up to one overall scale (a field rescaling).

    The scale is the least-squares lambda over all sampled pairs,
    lambda = sum(P~ P + Q~ Q) / sum(P^2 + Q^2); the residual is the
    largest normalized gap between (P~, Q~) and lambda (P, Q).  A
    non-positive lambda means the rescaled family is inadmissible.
    """
    rows = [r for r in _scan(fam, samples, seed, workers) if r is not None]
    bad = samples - len(rows)
    if not rows:
        return ResidualReport(fam.name, samples, math.inf, None, bad)
    num = sum(pt * p + qt * q for p, q, pt, qt in rows)
    den = sum(p * p + q * q for p, q, pt, qt in rows)
    lam = num / den
    worst = max(max(abs(pt - lam * p), abs(qt - lam * q)) / (1.0 + abs(p) + abs(q))
                for p, q, pt, qt in rows)
    return ResidualReport(fam.name, samples, worst, lam, bad)


def swap_asymmetry(fam: ActionFamily, samples: int, seed: int) -> float:
    """Largest violation of P(swap a) = P(a), Q(swap a) = Q(a) on a scan."""
    from .shape import SWAP  # local to keep the module header light
    worst = 0.0
    for i in range(samples):
        a = sample_shape(seed, i)
        sa = apply_group(SWAP, a)
        worst = max(worst, abs(fam.P(sa) - fam.P(a)), abs(fam.Q(sa) - fam.Q(a)))
    return worst
