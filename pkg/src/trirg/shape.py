"""Similarity classes of marked triangles.

A marked triangle, up to similarity and reflection, is recorded by the
cotangents ``(a0, a1, a2)`` of its three angles.  Because the angles sum
to pi, the cotangents satisfy

    a0*a1 + a1*a2 + a2*a0 = 1,

so shape space is a hyperboloid: with eta = (1/2) * [[0,1,1],[1,0,1],[1,1,0]]
the identity reads ``a^T eta a = 1``.  This module provides that
representation, the equivalent Minkowski and upper-half-plane coordinates,
and the vertex-relabeling matrices together with the centroid-subdivision
matrix.  All matrices are stored as exact rationals so that their algebra
(relations, eta-orthogonality) holds with zero residual; only the action
on floating-point cotangent data is inexact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import (AngleDomain, DegenerateTriangle, HalfPlaneDomain,
                     IdentityViolation)

# Residual budget for the cotangent identity scales with flatness**2:
# flat triangles have huge cotangents and cancel catastrophically.
IDENTITY_TOL_SCALE = 1e-9

# |signed area| below this fraction of perimeter**2 counts as degenerate.
DEGENERATE_AREA_REL = 1e-14

_ANGLE_SUM_TOL = 1e-9

Matrix = tuple[tuple[Fraction, Fraction, Fraction], ...]

_HALF = Fraction(1, 2)
ETA: Matrix = (
    (Fraction(0), _HALF, _HALF),
    (_HALF, Fraction(0), _HALF),
    (_HALF, _HALF, Fraction(0)),
)


def _mat(rows: Iterable[Iterable]) -> Matrix:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3))
        for i in range(3)
    )


def _transpose(a: Matrix) -> Matrix:
    return tuple(tuple(a[j][i] for j in range(3)) for i in range(3))


@dataclass(frozen=True)
class CotangentVector:
    """Cotangents of the angles at vertices 0, 1, 2 of a marked triangle.

    Construction normalizes the reflection ambiguity (components are
    negated if their sum is negative) and then rejects the vector unless
    the cotangent identity holds within the flatness-scaled tolerance.
    """

    a0: float
    a1: float
    a2: float

    def __post_init__(self):
        if self.a0 + self.a1 + self.a2 < 0.0:
            object.__setattr__(self, "a0", -self.a0)
            object.__setattr__(self, "a1", -self.a1)
            object.__setattr__(self, "a2", -self.a2)
        res = identity_residual(self)
        if not res <= identity_tolerance(self):
            raise IdentityViolation(
                f"cotangent identity residual {res:.3e} exceeds tolerance "
                f"{identity_tolerance(self):.3e} for {self}")

    def astuple(self) -> tuple[float, float, float]:
        return (self.a0, self.a1, self.a2)

    @property
    def total(self) -> float:
        return self.a0 + self.a1 + self.a2


def identity_residual(a: CotangentVector) -> float:
    """|a0*a1 + a1*a2 + a2*a0 - 1|."""
    return abs(a.a0 * a.a1 + a.a1 * a.a2 + a.a2 * a.a0 - 1.0)


def identity_tolerance(a: CotangentVector) -> float:
    """Allowed identity residual: IDENTITY_TOL_SCALE * max(1, flatness^2)."""
    f = 4.0 * (a.a0 + a.a1 + a.a2)
    return IDENTITY_TOL_SCALE * max(1.0, f * f)


def flatness(a: CotangentVector) -> float:
    """Sum of squared side lengths over area: 4 * (a0 + a1 + a2).

    Minimal (4*sqrt(3)) exactly for the equilateral shape and diverging
    as the triangle degenerates.
    """
    return 4.0 * a.total


@dataclass(frozen=True)
class MinkowskiVector:
    """Point on the unit hyperboloid p0^2 - p1^2 - p2^2 = 1, p0 > 0."""

    p0: float
    p1: float
    p2: float

    def __post_init__(self):
        res = abs(self.p0 ** 2 - self.p1 ** 2 - self.p2 ** 2 - 1.0)
        if not res <= 1e-10 * max(1.0, self.p0 ** 2):
            raise IdentityViolation(
                f"Minkowski norm residual {res:.3e} too large for {self}")
        if not self.p0 > 0.0:
            raise IdentityViolation("not on the forward sheet: p0 <= 0")

    def astuple(self) -> tuple[float, float, float]:
        return (self.p0, self.p1, self.p2)


@dataclass(frozen=True)
class HalfPlanePoint:
    """Vertex-0 coordinate when vertex 1 is sent to 0 and vertex 2 to 1."""

    re: float
    im: float

    def __post_init__(self):
        if not self.im > 0.0:
            raise HalfPlaneDomain(f"im = {self.im} must be positive")

    @property
    def z(self) -> complex:
        return complex(self.re, self.im)


@dataclass(frozen=True)
class GroupElement:
    """Exact 3x3 rational matrix acting on cotangent vectors.

    Every element preserves the quadratic form eta exactly
    (m^T eta m == eta), which is what makes the cotangent identity
    survive the action.  ``word`` records the generator labels the
    element was composed from, oldest factor last (matrix order).
    """

    m: Matrix
    word: tuple[str, ...] = ()
    mf: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if _matmul(_matmul(_transpose(self.m), ETA), self.m) != ETA:
            raise ValueError(f"matrix does not preserve eta: {self.m}")
        f = np.array([[float(x) for x in row] for row in self.m])
        f.flags.writeable = False
        object.__setattr__(self, "mf", f)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(_matmul(self.m, other.m), self.word + other.word)


IDENTITY = GroupElement(_mat([[1, 0, 0], [0, 1, 0], [0, 0, 1]]))

# Cyclic relabeling of the vertices 0 -> 1 -> 2 -> 0: (ROTATE a)_i = a_{i+1}.
ROTATE = GroupElement(_mat([[0, 1, 0], [0, 0, 1], [1, 0, 0]]), ("rot",))

# Swap of vertices 1 and 2 (reflection through the vertex-0 axis).
SWAP = GroupElement(_mat([[1, 0, 0], [0, 0, 1], [0, 1, 0]]), ("swap",))

# Shape of the centroid sub-triangle opposite vertex 0, centroid angle
# listed first.  Entries are thirds, hence the rational storage.
CENTER = GroupElement(
    _mat([[Fraction(1, 3), Fraction(-2, 3), Fraction(-2, 3)],
          [0, 2, 1],
          [0, 1, 2]]),
    ("center",))

GENERATORS = {"rot": ROTATE, "swap": SWAP, "center": CENTER}


def apply_group(g: GroupElement, a: CotangentVector) -> CotangentVector:
    """Act on a shape by an exact group element; validates the result."""
    v = g.mf @ np.array(a.astuple())
    return CotangentVector(float(v[0]), float(v[1]), float(v[2]))


def cot_from_angles(theta0: float, theta1: float, theta2: float) -> CotangentVector:
    """Shape of the triangle with the given angles (radians)."""
    for t in (theta0, theta1, theta2):
        if not 0.0 < t < math.pi:
            raise AngleDomain(f"angle {t} outside (0, pi)")
    if abs(theta0 + theta1 + theta2 - math.pi) > _ANGLE_SUM_TOL:
        raise AngleDomain(
            f"angles sum to {theta0 + theta1 + theta2}, expected pi")
    return CotangentVector(*(math.cos(t) / math.sin(t)
                             for t in (theta0, theta1, theta2)))


def _pt(p) -> tuple[float, float]:
    x, y = p
    return (float(x), float(y))


def cot_from_coords(x0, x1, x2) -> CotangentVector:
    """Shape of the triangle with vertices x0, x1, x2 (2-D points).

    The result is reflection-normalized, so vertex order only matters up
    to the marking, not the orientation.  Raises DegenerateTriangle when
    the signed area is below DEGENERATE_AREA_REL * perimeter^2.
    """
    x0, x1, x2 = _pt(x0), _pt(x1), _pt(x2)
    e1 = (x1[0] - x0[0], x1[1] - x0[1])
    e2 = (x2[0] - x0[0], x2[1] - x0[1])
    e3 = (e2[0] - e1[0], e2[1] - e1[1])
    cross = e1[0] * e2[1] - e1[1] * e2[0]
    perim = math.hypot(*e1) + math.hypot(*e2) + math.hypot(*e3)
    if abs(cross) / 2.0 < DEGENERATE_AREA_REL * perim * perim:
        raise DegenerateTriangle(
            f"signed area {cross / 2.0:.3e} below threshold for {x0}, {x1}, {x2}")
    a0 = (e1[0] * e2[0] + e1[1] * e2[1]) / cross
    a1 = (e1[0] * e1[0] + e1[1] * e1[1] - (e1[0] * e2[0] + e1[1] * e2[1])) / cross
    a2 = (e2[0] * e2[0] + e2[1] * e2[1] - (e1[0] * e2[0] + e1[1] * e2[1])) / cross
    return CotangentVector(a0, a1, a2)  # constructor reflects if cross < 0


_SQRT3 = math.sqrt(3.0)


def to_minkowski(a: CotangentVector) -> MinkowskiVector:
    """Embed a shape on the unit hyperboloid in Minkowski R^{1,2}."""
    return MinkowskiVector(
        (a.a0 + a.a1 + a.a2) / _SQRT3,
        (a.a2 - a.a1) / 2.0,
        (2.0 * a.a0 - a.a1 - a.a2) / (2.0 * _SQRT3),
    )


def to_halfplane(a: CotangentVector) -> HalfPlanePoint:
    """Upper-half-plane coordinate z = (a1 + i) / (a1 + a2) of a shape."""
    s = a.a1 + a.a2
    return HalfPlanePoint(a.a1 / s, 1.0 / s)


def from_halfplane(z: HalfPlanePoint) -> CotangentVector:
    """Shape of the triangle with vertices z, 0, 1 (marked in that order)."""
    a1 = z.re / z.im
    a2 = (1.0 - z.re) / z.im
    return CotangentVector((1.0 - a1 * a2) / (a1 + a2), a1, a2)


def moebius(label: str, z: HalfPlanePoint) -> HalfPlanePoint:
    """Apply one generator to a half-plane coordinate.

    rot: z -> 1/(1 - z); swap: z -> 1 - conj(z); center: z -> (1 + z)/3.
    Each commutes with the matrix action through to_halfplane.
    """
    w = z.z
    if label == "rot":
        r = 1.0 / (1.0 - w)
    elif label == "swap":
        r = 1.0 - w.conjugate()
    elif label == "center":
        r = (1.0 + w) / 3.0
    else:
        raise ValueError(f"unknown generator label {label!r}")
    return HalfPlanePoint(r.real, r.imag)
