"""Shape-space coordinates, the permutation group, and their coherence."""

import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trirg.errors import (AngleDomain, DegenerateTriangle, HalfPlaneDomain,
                          IdentityViolation)
from trirg.shape import (CENTER, ETA, IDENTITY, ROTATE, SWAP, CotangentVector,
                         GroupElement, HalfPlanePoint, _matmul, _transpose,
                         apply_group, cot_from_angles, cot_from_coords,
                         flatness, from_halfplane, identity_residual,
                         identity_tolerance, moebius, to_halfplane,
                         to_minkowski)

EQ = 1.0 / math.sqrt(3.0)


def equilateral():
    return CotangentVector(EQ, EQ, EQ)


# exact group algebra ------------------------------------------------------

def test_rotation_has_order_three():
    assert (ROTATE @ ROTATE @ ROTATE).m == IDENTITY.m


def test_swap_is_an_involution():
    assert (SWAP @ SWAP).m == IDENTITY.m


def test_swap_conjugates_rotation_to_its_inverse():
    assert (SWAP @ ROTATE @ SWAP).m == (ROTATE @ ROTATE).m


def test_subdivision_commutes_with_swap():
    assert (CENTER @ SWAP).m == (SWAP @ CENTER).m


def test_generators_preserve_identity_form_exactly():
    for g in (ROTATE, SWAP, CENTER, CENTER @ ROTATE, SWAP @ CENTER @ ROTATE):
        assert _matmul(_matmul(_transpose(g.m), ETA), g.m) == ETA


def test_long_generator_words_preserve_form_exactly():
    # composition stays in the form-preserving group, with exact rationals
    rng = random.Random(0)
    gens = (ROTATE, SWAP, CENTER)
    for _ in range(40):
        g = IDENTITY
        for _ in range(8):
            g = gens[rng.randrange(3)] @ g
        assert _matmul(_matmul(_transpose(g.m), ETA), g.m) == ETA


def test_group_element_rejects_non_preserving_matrix():
    double = tuple(tuple(Fraction(2) * x for x in row) for row in IDENTITY.m)
    with pytest.raises(ValueError):
        GroupElement(double, ("bad",))


def test_rotation_cycles_components():
    a = cot_from_angles(0.5, 0.9, math.pi - 1.4)
    ra = apply_group(ROTATE, a)
    assert ra.astuple() == pytest.approx((a.a1, a.a2, a.a0), abs=0)


def test_swap_exchanges_last_two_components():
    a = cot_from_angles(0.5, 0.9, math.pi - 1.4)
    sa = apply_group(SWAP, a)
    assert sa.astuple() == pytest.approx((a.a0, a.a2, a.a1), abs=0)


# cotangent vectors --------------------------------------------------------

def test_equilateral_cotangents():
    a = cot_from_angles(math.pi / 3, math.pi / 3, math.pi / 3)
    assert a.astuple() == pytest.approx((EQ, EQ, EQ), abs=1e-15)
    assert flatness(a) == pytest.approx(4.0 * math.sqrt(3.0), abs=1e-12)


def test_right_isoceles_cotangents():
    a = cot_from_angles(math.pi / 2, math.pi / 4, math.pi / 4)
    assert a.astuple() == pytest.approx((0.0, 1.0, 1.0), abs=1e-15)


def test_construction_normalizes_reflection():
    a = CotangentVector(0.0, -1.0, -1.0)
    assert a.astuple() == (0.0, 1.0, 1.0)


def test_identity_violation_is_rejected():
    with pytest.raises(IdentityViolation):
        CotangentVector(1.0, 1.0, 1.0)


def test_tolerance_grows_with_flatness():
    assert identity_tolerance(equilateral()) == pytest.approx(
        1e-9 * (4.0 * math.sqrt(3.0)) ** 2)
    flat = cot_from_angles(1e-3, (math.pi - 1e-3) / 2, (math.pi - 1e-3) / 2)
    assert flatness(flat) > 3000.0
    assert identity_tolerance(flat) > 1e-9 * 3000.0 ** 2


def test_angles_must_sum_to_pi():
    with pytest.raises(AngleDomain):
        cot_from_angles(1.0, 1.0, 1.0)
    with pytest.raises(AngleDomain):
        cot_from_angles(0.0, math.pi / 2, math.pi / 2)
    with pytest.raises(AngleDomain):
        cot_from_angles(-0.5, math.pi, math.pi / 2 - 0.5)


def test_coords_give_same_shape_as_angles():
    a = cot_from_coords((0.0, 0.0), (1.0, 0.0), (0.5, 0.5 * math.sqrt(3.0)))
    assert a.astuple() == pytest.approx((EQ, EQ, EQ), abs=1e-12)


def test_coords_shape_is_similarity_invariant():
    pts = [(0.3, -0.2), (1.7, 0.4), (0.9, 1.5)]
    a = cot_from_coords(*pts)
    c, s, t = math.cos(0.7), math.sin(0.7), (5.0, -3.0)
    moved = [(2.0 * (c * x - s * y) + t[0], 2.0 * (s * x + c * y) + t[1])
             for x, y in pts]
    b = cot_from_coords(*moved)
    assert b.astuple() == pytest.approx(a.astuple(), abs=1e-12)


def test_coords_reflection_gives_same_cotangents():
    pts = [(0.3, -0.2), (1.7, 0.4), (0.9, 1.5)]
    a = cot_from_coords(*pts)
    mirrored = [(x, -y) for x, y in pts]
    b = cot_from_coords(*mirrored)
    assert b.astuple() == pytest.approx(a.astuple(), abs=1e-12)


def test_collinear_coords_are_degenerate():
    with pytest.raises(DegenerateTriangle):
        cot_from_coords((0.0, 0.0), (1.0, 0.0), (2.0, 0.0))
    with pytest.raises(DegenerateTriangle):
        cot_from_coords((0.0, 0.0), (1.0, 1.0), (1.0 + 1e-16, 1.0 + 1e-16))


# hyperboloid and half plane -----------------------------------------------

def test_equilateral_sits_at_hyperboloid_apex():
    p = to_minkowski(equilateral())
    assert p.astuple() == pytest.approx((1.0, 0.0, 0.0), abs=1e-12)


def test_right_isoceles_on_hyperboloid():
    p = to_minkowski(CotangentVector(0.0, 1.0, 1.0))
    assert p.astuple() == pytest.approx(
        (2.0 / math.sqrt(3.0), 0.0, -1.0 / math.sqrt(3.0)), abs=1e-15)


def test_minkowski_norm_is_one():
    for angles in [(0.4, 1.1), (1.2, 0.3), (0.2, 0.25)]:
        a = cot_from_angles(angles[0], angles[1], math.pi - sum(angles))
        p = to_minkowski(a)
        assert p.p0 ** 2 - p.p1 ** 2 - p.p2 ** 2 == pytest.approx(1.0, abs=1e-12)
        assert p.p0 > 0.0


def test_halfplane_examples():
    z = to_halfplane(CotangentVector(0.0, 1.0, 1.0))
    assert (z.re, z.im) == pytest.approx((0.5, 0.5), abs=1e-15)
    z = to_halfplane(equilateral())
    assert (z.re, z.im) == pytest.approx((0.5, 0.5 * math.sqrt(3.0)), abs=1e-12)


def test_halfplane_round_trip():
    a = cot_from_angles(0.3, 1.1, math.pi - 1.4)
    b = from_halfplane(to_halfplane(a))
    assert b.astuple() == pytest.approx(a.astuple(), abs=1e-12)


def test_halfplane_rejects_lower_half():
    with pytest.raises(HalfPlaneDomain):
        HalfPlanePoint(0.5, 0.0)
    with pytest.raises(HalfPlaneDomain):
        HalfPlanePoint(0.5, -1.0)


def test_moebius_rotation_at_i():
    # 1/(1-i) = (1+i)/2: rotation carries one right-isoceles point to another
    w = moebius("rot", HalfPlanePoint(0.0, 1.0))
    assert (w.re, w.im) == pytest.approx((0.5, 0.5), abs=1e-15)


def test_moebius_formulas():
    z = HalfPlanePoint(0.3, 0.8)
    w = moebius("rot", z)
    expect = 1.0 / (1.0 - z.z)
    assert (w.re, w.im) == pytest.approx((expect.real, expect.imag), abs=1e-15)
    w = moebius("swap", z)
    assert (w.re, w.im) == pytest.approx((0.7, 0.8), abs=1e-15)
    w = moebius("center", z)
    assert (w.re, w.im) == pytest.approx((1.3 / 3.0, 0.8 / 3.0), abs=1e-15)
    with pytest.raises(ValueError):
        moebius("nope", z)


@pytest.mark.parametrize("label,g", [("rot", ROTATE), ("swap", SWAP),
                                     ("center", CENTER)])
def test_moebius_matches_matrix_action(label, g):
    # the half-plane picture and the cotangent picture must commute
    a = cot_from_angles(0.4, 1.3, math.pi - 1.7)
    via_matrix = to_halfplane(apply_group(g, a))
    via_moebius = moebius(label, to_halfplane(a))
    assert (via_matrix.re, via_matrix.im) == pytest.approx(
        (via_moebius.re, via_moebius.im), abs=1e-12)


# properties ---------------------------------------------------------------

angles_strategy = st.tuples(
    st.floats(min_value=0.1, max_value=2.8),
    st.floats(min_value=0.1, max_value=2.8),
).filter(lambda t: 0.1 < math.pi - t[0] - t[1] < 2.8)


@settings(max_examples=60, deadline=None)
@given(angles_strategy)
def test_identity_holds_for_sampled_angles(angles):
    a = cot_from_angles(angles[0], angles[1], math.pi - angles[0] - angles[1])
    assert identity_residual(a) <= identity_tolerance(a)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=-5.0, max_value=5.0),
       st.floats(min_value=0.01, max_value=10.0))
def test_halfplane_coordinates_round_trip(re, im):
    a = from_halfplane(HalfPlanePoint(re, im))
    z = to_halfplane(a)
    assert z.re == pytest.approx(re, abs=1e-9 * max(1.0, abs(re)))
    assert z.im == pytest.approx(im, abs=1e-9 * max(1.0, im))


@settings(max_examples=40, deadline=None)
@given(angles_strategy)
def test_flatness_is_minimal_at_equilateral(angles):
    a = cot_from_angles(angles[0], angles[1], math.pi - angles[0] - angles[1])
    assert flatness(a) >= 4.0 * math.sqrt(3.0) - 1e-12


@settings(max_examples=60, deadline=None)
@given(angles_strategy)
def test_at_most_one_component_is_nonpositive(angles):
    # a triangle has at most one non-acute angle
    a = cot_from_angles(angles[0], angles[1], math.pi - angles[0] - angles[1])
    assert sum(1 for x in a.astuple() if x <= 0.0) <= 1


def test_flatness_is_permutation_invariant():
    a = cot_from_angles(0.5, 0.9, math.pi - 1.4)
    fa = flatness(a)
    for g in (ROTATE, ROTATE @ ROTATE, SWAP, SWAP @ ROTATE):
        assert flatness(apply_group(g, a)) == pytest.approx(fa, rel=1e-15)
