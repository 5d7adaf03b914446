import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diracshell import geometry as geo
from diracshell.errors import (
    CuspError,
    EmptyCorners,
    InvalidRefinement,
    OpenCurveError,
    SelfIntersectionError,
)


def test_circle_build(circle_curve):
    assert len(circle_curve.corners) == 0
    assert circle_curve.length == pytest.approx(2 * math.pi, abs=1e-10)
    assert circle_curve.is_single_smooth


def test_square_build(square_curve):
    assert len(square_curve.corners) == 4
    assert np.allclose(geo.interior_angles(square_curve), math.pi / 2)
    assert square_curve.length == pytest.approx(4.0, abs=1e-12)


def test_regular_polygon_square_equivalent():
    c = geo.build_curve(geo.regular_polygon(4, 1.0 / math.sqrt(2.0)))
    assert len(c.corners) == 4
    assert np.allclose(geo.interior_angles(c), math.pi / 2)
    assert c.length == pytest.approx(4.0, abs=1e-12)


def test_l_shape_angles():
    c = geo.build_curve(geo.l_shape(1.0))
    th = np.sort(geo.interior_angles(c))
    assert len(th) == 6
    assert np.allclose(th[:5], math.pi / 2)
    assert th[5] == pytest.approx(3 * math.pi / 2, abs=1e-12)


def test_circle_grid_is_equispaced(circle_curve):
    g = geo.discretize(circle_curve, 64)
    want = np.stack([np.cos(2 * np.pi * np.arange(64) / 64),
                     np.sin(2 * np.pi * np.arange(64) / 64)], axis=-1)
    assert np.max(np.abs(g.nodes - want)) < 1e-14
    assert np.allclose(g.weights, 2 * np.pi / 64)


def test_square_grid_counts_and_perimeter(square_curve):
    g = geo.discretize(square_curve, 32, 3.0)
    assert g.n_nodes == 128
    assert g.weights.sum() == pytest.approx(4.0, abs=1e-8)
    assert np.all(g.weights > 0)
    # corners never collide with nodes
    assert g.corner_distance.min() > 1e-4


def test_square_grading_follows_cubic_law(square_curve):
    g = geo.discretize(square_curve, 32, 3.0)
    # breakpoints of the 4 panels on each edge follow t -> t^3 toward corners
    panels = [p for p in g.panels if p.edge_id == 0]
    bps = sorted({p.t_a for p in panels} | {p.t_b for p in panels})
    assert bps == pytest.approx([0.0, 0.5 * 0.5**3, 0.5, 1.0 - 0.5 * 0.5**3, 1.0])


def test_grid_frames(square_curve, circle_curve):
    for g in (geo.discretize(square_curve, 16), geo.discretize(circle_curve, 32)):
        # paper convention: tau = (-nu2, nu1) exactly
        assert np.array_equal(g.tangents,
                              np.stack([-g.normals[:, 1], g.normals[:, 0]], axis=-1))
        dots = np.einsum("ij,ij->i", g.tangents, g.normals)
        assert np.max(np.abs(dots)) < 1e-15


def test_circle_normal_points_outward(circle_curve):
    g = geo.discretize(circle_curve, 16)
    assert np.allclose(g.normals, g.nodes, atol=1e-13)  # radially outward


def test_interior_angle_examples(circle_curve, square_curve):
    assert geo.interior_angles(circle_curve).size == 0
    assert np.allclose(geo.interior_angles(square_curve), math.pi / 2)


def test_sharpest_angle():
    assert geo.sharpest_angle([math.pi / 2] * 4) == pytest.approx(math.pi / 2)
    assert geo.sharpest_angle([3 * math.pi / 2]) == pytest.approx(math.pi / 2)
    assert geo.sharpest_angle([0.3 * math.pi, 1.4 * math.pi]) == pytest.approx(0.3 * math.pi)
    with pytest.raises(EmptyCorners):
        geo.sharpest_angle([])


def test_refinement_convergence_of_perimeter():
    presets = [geo.circle(1.0), geo.ellipse(4.0, 1.0), geo.square(1.0),
               geo.l_shape(1.0), geo.rounded_square(1.0, 0.15)]
    for spec in presets:
        c = geo.build_curve(spec)
        errs = []
        for n in (64, 128, 256):
            g = geo.discretize(c, n)
            errs.append(abs(g.weights.sum() - c.length))
        floor = 64 * np.finfo(float).eps * c.length
        assert errs[1] <= errs[0] + floor
        assert errs[2] <= errs[1] + floor


@settings(max_examples=30, deadline=None)
@given(st.floats(-math.pi, math.pi), st.floats(-5, 5), st.floats(-5, 5),
       st.floats(0.1, 10.0))
def test_interior_angles_rigid_motion_invariant(rot, tx, ty, scale):
    base = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]
    r = np.array([[math.cos(rot), -math.sin(rot)], [math.sin(rot), math.cos(rot)]])
    moved = [scale * r @ np.array(v) + np.array([tx, ty]) for v in base]
    c0 = geo.build_curve(geo.polygon_from_vertices(base))
    c1 = geo.build_curve(geo.polygon_from_vertices(moved))
    assert np.max(np.abs(geo.interior_angles(c0) - geo.interior_angles(c1))) < 1e-12


def test_orientation_normalized():
    # clockwise input gets reversed to anticlockwise
    cw = geo.polygon_from_vertices([(0, 0), (0, 1), (1, 1), (1, 0)])
    c = geo.build_curve(cw)
    assert c.signed_area > 0
    assert np.allclose(geo.interior_angles(c), math.pi / 2)


def test_open_curve_error():
    e1 = geo.line_edge((0, 0), (1, 0))
    e2 = geo.line_edge((1, 0.5), (0, 0))  # gap at (1, 0)
    with pytest.raises(OpenCurveError):
        geo.build_curve(geo.CurveSpec((e1, e2)))


def test_cusp_error():
    # two arches over [0,1] meeting tangentially at (1,0): a cusp, but the
    # arcs stay apart so the self-intersection check is not triggered
    e1 = geo.Edge("poly", (0.0, 1.0), (0.0, 0.5, -0.5))  # y = 0.5 t (1-t)
    e2 = geo.Edge("poly", (1.0, -1.0), (0.0, 0.5, 1.5, -2.0))  # higher arch, back
    with pytest.raises(CuspError):
        geo.build_curve(geo.CurveSpec((e1, e2)))


def test_self_intersection_error():
    bowtie = geo.polygon_from_vertices([(0, 0), (1, 1), (1, 0), (0, 1)])
    with pytest.raises(SelfIntersectionError):
        geo.build_curve(bowtie)


def test_invalid_refinement(circle_curve, square_curve):
    with pytest.raises(InvalidRefinement):
        geo.discretize(circle_curve, 63)  # odd
    with pytest.raises(InvalidRefinement):
        geo.discretize(circle_curve, 6)  # too few
    with pytest.raises(InvalidRefinement):
        geo.discretize(square_curve, 16, 0.5)  # grading below 1


def test_rounded_square_is_smooth():
    c = geo.build_curve(geo.rounded_square(1.0, 0.15))
    assert len(c.corners) == 0
    s = 1.0 - 2 * 0.15
    assert c.length == pytest.approx(4 * s + 2 * math.pi * 0.15, abs=1e-10)


def test_corner_frame_convention(square_curve):
    for c in square_curve.corners:
        assert np.linalg.norm(c.tau) == pytest.approx(1.0, abs=1e-14)
        assert np.linalg.norm(c.nu) == pytest.approx(1.0, abs=1e-14)
        # corner normal is tau rotated by +pi/2
        assert np.allclose(c.nu, [-c.tau[1], c.tau[0]])
        assert np.allclose(c.tau, -c.tau_minus)
        # the two arm directions enclose the interior angle on the Omega_+ side
        cosang = float(np.dot(c.tau_plus, c.tau_minus))
        assert math.acos(np.clip(cosang, -1, 1)) == pytest.approx(
            min(c.theta, 2 * math.pi - c.theta), abs=1e-12)


def test_grid_immutability(circle_curve):
    g = geo.discretize(circle_curve, 32)
    with pytest.raises(ValueError):
        g.nodes[0, 0] = 5.0
