"""Energy reports, closed-curve identities, and the turning lower bounds."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from elastica_lab.curves import ArcCurve, CurveKind, sample_analytic
from elastica_lab.energy import (
    EnergyReport,
    NotClosedError,
    analytic_energies,
    c0_closed_identity_check,
    energies,
    rotation_lower_bound,
    tail_energy_bound,
    turning_lower_bound,
)
from elastica_lab.shapes import (
    SERPENT_ENERGY,
    borderline,
    circle_curve,
    figure_eight,
    serpent,
    teardrop_loop,
)


def test_unit_circle_components():
    c = circle_curve(radius=1.0, n=4001)
    rep = energies(c)
    assert abs(rep.length - 2.0 * math.pi) < 1e-5
    assert abs(rep.bending - math.pi) < 1e-5
    # closed curve: tangent integrates to zero, direction term is the length
    assert c0_closed_identity_check(c) < 1e-10
    assert abs(rep.energy - rep.elastic_energy) < 1e-10


def test_circle_radius_optimises_elastic_energy():
    best = energies(circle_curve(n=4001)).elastic_energy
    assert abs(best - 2.0 * math.sqrt(2.0) * math.pi) < 1e-4
    for radius in (0.6, 0.9):
        other = energies(circle_curve(radius=radius, n=4001)).elastic_energy
        assert other > best + 0.05


def test_closed_identity_requires_closed_curve():
    c = ArcCurve(
        params=np.linspace(0.0, 1.0, 11),
        points=np.column_stack((np.linspace(0.0, 1.0, 11), np.zeros(11))),
        kind=CurveKind.OPEN_ARC,
    )
    with pytest.raises(NotClosedError):
        c0_closed_identity_check(c)


def test_tail_bound_is_sharp_on_borderline():
    # the omitted tails ARE borderline tails, so computed + bound is exact
    rep = analytic_energies(borderline(), -8.0, 8.0)
    assert abs(rep.energy + rep.tail_bound - 8.0) < 1e-9
    assert borderline().closed_form_energy == 8.0


def test_serpent_energy_matches_closed_form():
    rep = analytic_energies(serpent(), -8.0, 8.0)
    assert abs(rep.energy + rep.tail_bound - SERPENT_ENERGY) < 1e-12
    assert abs(SERPENT_ENERGY - (8.0 - 4.0 * math.sqrt(2.0))) < 1e-15


def test_discrete_energies_track_analytic():
    ana = analytic_energies(serpent(), -8.0, 8.0)
    num = energies(sample_analytic(serpent(), -8.0, 8.0, 4001))
    assert abs(num.energy - ana.energy) < 1e-4
    assert abs(num.length - ana.length) < 1e-4
    assert num.quad_error < 1e-3


def test_turning_lower_bound_values():
    assert turning_lower_bound(0.0) == 0.0
    assert abs(turning_lower_bound(math.pi) - SERPENT_ENERGY) < 1e-12
    assert abs(turning_lower_bound(2.0 * math.pi) - 8.0) < 1e-12
    assert abs(turning_lower_bound(3.0 * math.pi) - (16.0 - 4.0 * math.sqrt(2.0))) < 1e-12
    assert abs(turning_lower_bound(4.0 * math.pi) - 16.0) < 1e-12
    with pytest.raises(ValueError):
        turning_lower_bound(-0.1)


def test_turning_lower_bound_continuous_at_full_turns():
    for k in (1, 2, 3):
        below = turning_lower_bound(2.0 * math.pi * k - 1e-9)
        assert abs(below - 8.0 * k) < 1e-7


@given(st.floats(min_value=0.0, max_value=30.0), st.floats(min_value=0.0, max_value=30.0))
def test_turning_lower_bound_monotone(a, b):
    lo, hi = sorted((a, b))
    assert turning_lower_bound(lo) <= turning_lower_bound(hi) + 1e-12


def test_tail_energy_bound_values():
    e1 = np.array([1.0, 0.0])
    assert tail_energy_bound(e1, 2) == 0.0
    assert abs(tail_energy_bound(-e1, 2) - 4.0) < 1e-14
    quarter = np.array([0.0, 1.0])
    assert abs(tail_energy_bound(quarter, 2) - (4.0 - 2.0 * math.sqrt(2.0))) < 1e-14
    # same defect in 3d
    assert abs(tail_energy_bound(np.array([0.0, 1.0, 0.0]), 3) - (4.0 - 2.0 * math.sqrt(2.0))) < 1e-14


def test_tail_energy_bound_small_angle_behaviour():
    phi = 1e-3
    t = np.array([math.cos(phi), math.sin(phi)])
    defect_sq = float(np.sum((t - np.array([1.0, 0.0])) ** 2))
    assert abs(tail_energy_bound(t, 2) / (defect_sq / 2.0) - 1.0) < 1e-5


def test_rotation_bound_on_winding_curves():
    bound, ok = rotation_lower_bound(circle_curve(n=4001))
    assert bound == 8.0 and ok
    bound, ok = rotation_lower_bound(teardrop_loop(4001))
    assert bound == 8.0 and ok
    # net winding of the figure eight cancels: only the trivial bound
    bound, ok = rotation_lower_bound(figure_eight(4001))
    assert bound == 0.0 and ok


def test_rotation_bound_rejects_plain_arc():
    c = ArcCurve(
        params=np.linspace(0.0, 1.0, 11),
        points=np.column_stack((np.linspace(0.0, 1.0, 11), np.zeros(11))),
        kind=CurveKind.OPEN_ARC,
    )
    with pytest.raises(ValueError):
        rotation_lower_bound(c)


def test_energy_report_rejects_negative_components():
    with pytest.raises(ValueError):
        EnergyReport(length=-1.0, direction=0.0, bending=0.0)
