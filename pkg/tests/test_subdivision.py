"""Centroid subdivision: shape algebra, meshes, and random flatness flow."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trirg.errors import DepthExceeded
from trirg.shape import (CotangentVector, cot_from_angles, cot_from_coords,
                         flatness, identity_residual, identity_tolerance)
from trirg.subdivide import (MAX_LEVELS, FlowStats, build_mesh, flow_csv,
                             mesh_shape_audit, random_flow, run_word,
                             subdivide_shape, word_element)

EQ = 1.0 / math.sqrt(3.0)


def some_shape():
    return cot_from_angles(0.5, 1.1, math.pi - 1.6)


def test_child_shapes_match_closed_forms():
    a = some_shape()
    c0, c1, c2 = subdivide_shape(a)
    # child opposite vertex 0, centroid angle listed first
    expect0 = ((a.a0 - 2.0 * a.a1 - 2.0 * a.a2) / 3.0,
               2.0 * a.a1 + a.a2, a.a1 + 2.0 * a.a2)
    assert c0.astuple() == pytest.approx(expect0, abs=1e-12)
    # the other two are the same formula after cycling the parent
    b = CotangentVector(a.a1, a.a2, a.a0)
    expect1 = ((b.a0 - 2.0 * b.a1 - 2.0 * b.a2) / 3.0,
               2.0 * b.a1 + b.a2, b.a1 + 2.0 * b.a2)
    assert c1.astuple() == pytest.approx(expect1, abs=1e-12)
    c = CotangentVector(a.a2, a.a0, a.a1)
    expect2 = ((c.a0 - 2.0 * c.a1 - 2.0 * c.a2) / 3.0,
               2.0 * c.a1 + c.a2, c.a1 + 2.0 * c.a2)
    assert c2.astuple() == pytest.approx(expect2, abs=1e-12)


def test_equilateral_children_are_congruent():
    a = cot_from_angles(math.pi / 3, math.pi / 3, math.pi / 3)
    for child in subdivide_shape(a):
        assert child.astuple() == pytest.approx(
            (-EQ, math.sqrt(3.0), math.sqrt(3.0)), abs=1e-12)
        assert flatness(child) == pytest.approx(20.0 / math.sqrt(3.0), abs=1e-12)


def test_right_isoceles_children():
    c0, c1, c2 = subdivide_shape(CotangentVector(0.0, 1.0, 1.0))
    assert c0.astuple() == pytest.approx((-4.0 / 3.0, 3.0, 3.0), abs=1e-12)
    assert c1.astuple() == pytest.approx((-1.0 / 3.0, 2.0, 1.0), abs=1e-12)
    assert c2.astuple() == pytest.approx((-1.0 / 3.0, 1.0, 2.0), abs=1e-12)


def test_centroid_angles_sum_to_two_pi():
    # component 0 of each child is the cotangent of its angle at the centroid
    for a in [some_shape(), cot_from_angles(0.2, 0.3, math.pi - 0.5),
              CotangentVector(0.0, 1.0, 1.0)]:
        total = sum(math.atan2(1.0, child.a0) for child in subdivide_shape(a))
        assert total == pytest.approx(2.0 * math.pi, abs=1e-10)


def test_children_preserve_identity():
    for child in subdivide_shape(some_shape()):
        assert identity_residual(child) <= identity_tolerance(child)


def test_word_element_composes_oldest_letter_first():
    a = some_shape()
    c1 = subdivide_shape(a)[1]
    c12 = subdivide_shape(c1)[2]
    assert run_word((1, 2), a).astuple() == pytest.approx(c12.astuple(),
                                                          abs=1e-12)


def test_empty_word_is_identity():
    a = some_shape()
    assert run_word((), a).astuple() == a.astuple()


def test_word_rejects_bad_letters():
    with pytest.raises(ValueError):
        word_element((0, 3))
    with pytest.raises(ValueError):
        word_element((-1,))


def test_subdivision_increases_flatness():
    # no child of a parent at the flatness minimum can be less flat
    a = cot_from_angles(math.pi / 3, math.pi / 3, math.pi / 3)
    for child in subdivide_shape(a):
        assert flatness(child) > flatness(a)


# meshes ---------------------------------------------------------------------


def test_mesh_counts():
    for levels in range(5):
        mesh = build_mesh((0.0, 0.0), (1.0, 0.0), (0.4, 0.9), levels)
        assert len(mesh.triangles) == 3 ** levels
        assert len(mesh.interior) == (3 ** levels - 1) // 2
        assert len(mesh.vertices) == 3 + len(mesh.interior)
        assert mesh.boundary == (0, 1, 2)
        assert all(t.level == levels for t in mesh.triangles)


def test_mesh_words_are_unique_and_sized():
    mesh = build_mesh((0.0, 0.0), (1.0, 0.0), (0.4, 0.9), 3)
    words = {t.word for t in mesh.triangles}
    assert len(words) == 27
    assert all(len(w) == 3 for w in words)


def test_mesh_leaf_areas_are_equal():
    # centroid subdivision splits every triangle into three equal areas
    mesh = build_mesh((0.0, 0.0), (1.0, 0.0), (0.4, 0.9), 3)
    def area(t):
        (x0, y0), (x1, y1), (x2, y2) = mesh.triangle_coords(t)
        return 0.5 * ((x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0))
    areas = [area(t) for t in mesh.triangles]
    assert areas == pytest.approx([0.45 / 27] * 27, rel=1e-12)


def test_mesh_normalizes_clockwise_roots():
    ccw = build_mesh((0.0, 0.0), (1.0, 0.0), (0.4, 0.9), 2)
    cw = build_mesh((0.0, 0.0), (0.4, 0.9), (1.0, 0.0), 2)
    assert cw.root_shape().astuple() == pytest.approx(
        ccw.root_shape().astuple(), abs=1e-12)


def test_mesh_depth_limits():
    with pytest.raises(DepthExceeded):
        build_mesh((0.0, 0.0), (1.0, 0.0), (0.4, 0.9), MAX_LEVELS + 1)
    with pytest.raises(ValueError):
        build_mesh((0.0, 0.0), (1.0, 0.0), (0.4, 0.9), -1)


def test_mesh_audit_small_through_level_four():
    for z in [(0.5, 0.5 * math.sqrt(3.0)), (0.5, 0.5), (0.2, 1.7)]:
        for levels in range(1, 5):
            mesh = build_mesh((0.0, 0.0), (1.0, 0.0), z, levels)
            assert mesh_shape_audit(mesh) < 1e-8


def test_mesh_json_schema():
    mesh = build_mesh((0.0, 0.0), (1.0, 0.0), (0.4, 0.9), 2)
    doc = json.loads(json.dumps(mesh.to_json_dict()))
    assert set(doc) == {"vertices", "triangles", "boundary", "interior"}
    assert doc["boundary"] == [0, 1, 2]
    assert doc["interior"] == list(range(3, 7))
    assert len(doc["vertices"]) == 7
    tri = doc["triangles"][0]
    assert set(tri) == {"v", "level", "word"}
    assert isinstance(tri["word"], str) and len(tri["word"]) == 2
    assert tri["level"] == 2


# random flow ----------------------------------------------------------------


def test_flow_is_deterministic_and_worker_independent():
    a = some_shape()
    one = random_flow(a, 12, 40, seed=7)
    two = random_flow(a, 12, 40, seed=7)
    four = random_flow(a, 12, 40, seed=7, workers=4)
    assert one == two == four
    other = random_flow(a, 12, 40, seed=8)
    assert one != other


def test_flow_row_shape():
    stats = random_flow(some_shape(), 5, 13, seed=0)
    assert [s.step for s in stats] == list(range(6))
    assert all(s.samples == 13 for s in stats)
    for s in stats:
        assert s.fmin <= s.q50 <= s.fmax
        # ulp slack: the mean of identical logs can round either way
        assert math.log(s.fmin) - 1e-12 <= s.mean_log_flatness
        assert s.mean_log_flatness <= math.log(s.fmax) + 1e-12


def test_flow_step_zero_is_the_start_shape():
    a = some_shape()
    stats = random_flow(a, 0, 5, seed=0)
    assert len(stats) == 1
    assert stats[0].fmin == stats[0].fmax == pytest.approx(flatness(a))


def test_flow_argument_validation():
    a = some_shape()
    with pytest.raises(ValueError):
        random_flow(a, -1, 5, seed=0)
    with pytest.raises(ValueError):
        random_flow(a, 5, 0, seed=0)


def test_flow_csv_layout():
    stats = random_flow(some_shape(), 2, 4, seed=3)
    text = flow_csv(stats, ["seed=3"])
    lines = text.splitlines()
    assert lines[0] == "# seed=3"
    assert lines[1] == FlowStats.CSV_HEADER
    assert len(lines) == 2 + 3
    first = lines[2].split(",")
    assert first[0] == "0" and first[1] == "4"
    # repr floats survive a round trip
    assert float(first[2]) == stats[0].fmin


def test_flow_median_grows_from_equilateral():
    a = cot_from_angles(math.pi / 3, math.pi / 3, math.pi / 3)
    stats = random_flow(a, 20, 300, seed=0)
    assert stats[5].q50 < stats[10].q50 < stats[20].q50


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2), st.integers(min_value=0, max_value=2),
       st.integers(min_value=0, max_value=2), st.integers(min_value=0, max_value=2))
def test_words_preserve_identity(k0, k1, k2, k3):
    a = run_word((k0, k1, k2, k3), cot_from_angles(0.7, 0.9, math.pi - 1.6))
    assert identity_residual(a) <= identity_tolerance(a)
