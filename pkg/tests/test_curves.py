"""Sampled-curve plumbing: stencils, lifts, turning, and file round trips."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import cumulative_trapezoid

from elastica_lab.curves import (
    ArcCurve,
    CurveKind,
    LiftError,
    discrete_curvature_vectors,
    discrete_tangents,
    ends_horizontal,
    net_turning,
    read_curve,
    reparametrize_arclength,
    rotation_number,
    rounded_rotation_number,
    sample_analytic,
    tangent_e1_total_variation,
    total_absolute_turning,
    write_curve,
)
from elastica_lab.shapes import (
    borderline,
    circle_curve,
    figure_eight,
    teardrop_loop,
    wavelike,
)


def unit_circle(n=401, radius=1.0):
    s = np.linspace(0.0, 2.0 * math.pi * radius, n)
    pts = radius * np.column_stack((np.cos(s / radius), np.sin(s / radius)))
    return ArcCurve(params=s, points=pts, kind=CurveKind.C0_CLOSED)


def curve_from_angle(s, theta):
    x = cumulative_trapezoid(np.cos(theta), s, initial=0.0)
    y = cumulative_trapezoid(np.sin(theta), s, initial=0.0)
    return ArcCurve(params=s, points=np.column_stack((x, y)), kind=CurveKind.OPEN_ARC)


def test_arccurve_rejects_nonincreasing_params():
    with pytest.raises(ValueError):
        ArcCurve(params=np.array([0.0, 1.0, 1.0]), points=np.zeros((3, 2)))


def test_tangents_are_unit_on_circle():
    T, speed = discrete_tangents(unit_circle())
    assert np.allclose(np.linalg.norm(T, axis=1), 1.0, atol=1e-12)
    assert np.allclose(speed, 1.0, atol=1e-4)


def test_curvature_magnitude_converges_at_second_order():
    errs = []
    for n in (201, 401, 801):
        kv = discrete_curvature_vectors(unit_circle(n, radius=2.0))
        errs.append(float(np.max(np.abs(np.linalg.norm(kv, axis=1) - 0.5))))
    # halving h should cut the error by about 4
    assert errs[0] / errs[1] > 3.0
    assert errs[1] / errs[2] > 3.0


def test_rotation_number_of_circle():
    c = circle_curve(n=2001)
    assert abs(rotation_number(c) - 1.0) < 1e-10
    assert abs(net_turning(c) - 2.0 * math.pi) < 1e-9
    winding, is_integer = rounded_rotation_number(c)
    assert winding == 1 and is_integer


def test_figure_eight_has_zero_net_turning():
    c = figure_eight(4001)
    assert abs(net_turning(c)) < 1e-9
    # but its lobes wind: more absolute variation than a full circle
    assert total_absolute_turning(c) > 2.0 * math.pi


def test_net_turning_ignores_cancelling_swings():
    # theta returns to zero after four full swing periods, so the net
    # turning vanishes up to the O(h^2) reconstruction error while the
    # variation keeps every swing (4 periods x 4 x 1.2 = 19.2).
    s = np.linspace(0.0, 10.0, 4001)
    theta = 1.2 * np.sin(2.0 * math.pi * s / 2.5)
    c = curve_from_angle(s, theta)
    assert abs(net_turning(c)) < 1e-5
    assert total_absolute_turning(c) > 19.0


def test_teardrop_loop_turns_once():
    assert abs(net_turning(teardrop_loop(2001)) - 2.0 * math.pi) < 1e-9


def test_straight_reversal_defeats_the_lift():
    # out and back along e1: consecutive tangents are antiparallel and
    # the angle lift has no continuous branch to follow
    c = ArcCurve(
        params=np.array([0.0, 1.0, 2.0]),
        points=np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 0.0]]),
        kind=CurveKind.OPEN_ARC,
    )
    with pytest.raises(LiftError):
        net_turning(c)


@given(
    st.lists(
        st.tuples(
            st.floats(min_value=-1.2, max_value=1.2),
            st.floats(min_value=-4.0, max_value=4.0),
            st.floats(min_value=0.6, max_value=2.0),
        ),
        min_size=1,
        max_size=4,
    )
)
@settings(max_examples=40, deadline=None)
def test_net_turning_equals_angle_difference(bumps):
    """For a curve built from a smooth angle, the lift must recover it."""
    s = np.linspace(-6.0, 6.0, 3001)
    theta = np.zeros_like(s)
    for amp, center, width in bumps:
        u = (s - center) / width
        inside = np.abs(u) < 1.0
        b = np.zeros_like(s)
        b[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
        theta += amp * b
    c = curve_from_angle(s, theta)
    assert abs(net_turning(c) - (theta[-1] - theta[0])) < 1e-6


def test_direction_variation_on_monotone_angle():
    # theta climbs 0 -> pi/2 once, so the variation of cos(theta) is 1.
    s = np.linspace(0.0, 4.0, 2001)
    theta = (math.pi / 2.0) * np.clip(s / 4.0, 0.0, 1.0)
    c = curve_from_angle(s, theta)
    assert abs(tangent_e1_total_variation(c) - 1.0) < 1e-3


def test_reparametrize_gives_uniform_arclength():
    c = sample_analytic(wavelike(0.6), -2.0, 2.0, 501)
    r = reparametrize_arclength(c, 801)
    gaps = np.diff(r.params)
    assert r.n_samples == 801
    assert np.allclose(gaps, gaps[0], rtol=1e-6)
    seg = np.linalg.norm(np.diff(r.points, axis=0), axis=1)
    assert np.allclose(seg, gaps, rtol=1e-3)


def test_ends_horizontal_on_truncated_borderline():
    c = sample_analytic(borderline(), -16.0, 16.0, 2001)
    flat, defects = ends_horizontal(c, tol=1e-5)
    assert flat
    assert max(defects) < 4.0 * math.exp(-16.0)


def test_write_read_round_trip_is_exact(tmp_path):
    c = circle_curve(n=101)
    path = tmp_path / "circle.csv"
    write_curve(path, c)
    back = read_curve(path)
    assert np.array_equal(back.points, c.points)
    assert np.array_equal(back.params, c.params)
    assert back.kind is c.kind


def test_read_curve_reports_offending_line(tmp_path):
    good = tmp_path / "good.csv"
    write_curve(good, circle_curve(n=51))
    lines = good.read_text().splitlines()
    lines[5] = "garbage,line"
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(ValueError, match=r"bad\.csv:6"):
        read_curve(bad)
