"""Model shapes: closed-form constants, assemblies, and their sampled forms.

Frozen reference numbers come from independent quadrature/root solves done
with scipy.special and scipy.integrate at the time the tests were written.
"""

import math
import time

import numpy as np
import pytest

from elastica_lab.curves import ArcCurve, CurveKind, discrete_tangents, sample_analytic
from elastica_lab.energy import analytic_energies, energies
from elastica_lab.shapes import (
    SERPENT_ENERGY,
    AssemblyError,
    borderline,
    borderline_angle_shift,
    borderline_with_angle,
    compute_teardrop_constants,
    cut_and_paste,
    figure_eight,
    figure_eight_modulus,
    figure_eight_scale_invariant_energy,
    pendant,
    pendant_contact_params,
    pendant_total_energy,
    sample_family,
    serpent,
    teardrop_elastic_energy,
    teardrop_length_bending,
    three_arc_analytic,
    three_arc_competitor,
    three_arc_elastic_energy,
    three_arc_length,
    two_teardrop_product_constant,
)

TEARDROP_MODULUS = 0.7311830257410411
TEARDROP_LENGTH = 6.2968750030250309
TEARDROP_BENDING = 2.9114612318249096
TEARDROP_ARC_RESCALED = 4.2817178156616915
TEARDROP_ELASTIC = 8.5634356313233866
FIGURE_EIGHT_MODULUS = 0.8261147659850072
FIGURE_EIGHT_ELASTIC = 14.995973442316604


def test_teardrop_constants_match_frozen_solve():
    tc = compute_teardrop_constants()
    assert abs(tc.modulus - TEARDROP_MODULUS) < 1e-10
    assert abs(tc.arc_length - TEARDROP_ARC_RESCALED) < 1e-10
    assert abs(tc.endpoint_curvature - math.sqrt(2.0)) < 1e-12
    assert abs(tc.rescale - math.sqrt(2.0 * tc.modulus - 1.0)) < 1e-15


def test_teardrop_constants_solve_is_quick():
    start = time.perf_counter()
    compute_teardrop_constants.__wrapped__()  # bypass the cache
    assert time.perf_counter() - start < 1.0


def test_teardrop_length_bending_frozen_values():
    length, bending = teardrop_length_bending()
    assert abs(length - TEARDROP_LENGTH) < 1e-10
    assert abs(bending - TEARDROP_BENDING) < 1e-10


def test_teardrop_rescale_equalizes_the_terms():
    # the homothety normalizing endpoint curvature is exactly the one
    # balancing length against bending, so their rescaled values agree
    tc = compute_teardrop_constants()
    length, bending = teardrop_length_bending()
    assert abs(tc.rescale**2 - bending / length) < 1e-12
    lhat, bhat = teardrop_length_bending(rescaled=True)
    assert abs(lhat - bhat) < 1e-12 * lhat
    assert abs(lhat * bhat - length * bending) < 1e-12 * length * bending


def test_teardrop_elastic_energy_frozen_value():
    assert abs(teardrop_elastic_energy() - TEARDROP_ELASTIC) < 1e-10
    lhat, bhat = teardrop_length_bending(rescaled=True)
    assert abs(teardrop_elastic_energy() - (lhat + bhat)) < 1e-12


def test_two_teardrop_product_constant():
    length, bending = teardrop_length_bending()
    assert abs(two_teardrop_product_constant() - 8.0 * length * bending) < 1e-12
    assert abs(two_teardrop_product_constant() - 146.664859623638) < 1e-9


def test_pendant_closed_form_energy():
    assert abs(pendant_total_energy() - 10.906581381831398) < 1e-10
    assert abs(pendant_total_energy() - (SERPENT_ENERGY + teardrop_elastic_energy())) < 1e-15


def test_pendant_grid_hits_the_contact():
    c = pendant(truncation_radius=8.0, n=4001)
    s0, s1 = pendant_contact_params()
    i0 = int(np.argmin(np.abs(c.params - s0)))
    i1 = int(np.argmin(np.abs(c.params - s1)))
    assert c.params[i0] == s0
    assert abs(c.params[i1] - s1) < 1e-12
    # tangential self-contact: the two visits land on the same point
    assert np.linalg.norm(c.points[i0] - c.points[i1]) < 1e-10


def test_pendant_discrete_energy_tracks_closed_form():
    c = pendant(truncation_radius=8.0, n=4001)
    rep = energies(c)
    assert abs(rep.energy + rep.tail_bound - pendant_total_energy()) < 5e-4


def test_borderline_energy_converges_at_second_order():
    errs = []
    for n in (1001, 2001, 4001):
        rep = energies(sample_analytic(borderline(), -8.0, 8.0, n))
        errs.append(abs(rep.energy + rep.tail_bound - 8.0))
    assert 3.7 < errs[0] / errs[1] < 4.3
    assert 3.7 < errs[1] / errs[2] < 4.3


def test_borderline_with_angle_energy_and_shift():
    assert borderline_with_angle(math.pi / 2.0).closed_form_energy == pytest.approx(
        8.0 * math.sin(math.pi / 8.0) ** 2, abs=1e-14
    )
    assert borderline_angle_shift(math.pi) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        borderline_angle_shift(0.0)
    with pytest.raises(ValueError):
        borderline_angle_shift(3.2)


def test_figure_eight_modulus_and_energy():
    m = figure_eight_modulus()
    assert abs(m - FIGURE_EIGHT_MODULUS) < 1e-10
    assert abs(figure_eight_scale_invariant_energy() - FIGURE_EIGHT_ELASTIC) < 1e-10


def test_figure_eight_curve_closes():
    c = figure_eight(2001)
    assert np.array_equal(c.points[0], c.points[-1])
    assert c.is_closed


def test_three_arc_closed_forms():
    assert three_arc_length() == 7.0 * math.sqrt(2.0) * math.pi / 6.0
    assert abs(three_arc_elastic_energy() - 10.366726855702854) < 1e-12
    ta = analytic_energies(three_arc_analytic(), 0.0, three_arc_length())
    assert abs(ta.elastic_energy - three_arc_elastic_energy()) < 1e-10
    # the assembly stays above the teardrop's optimum
    assert ta.elastic_energy > TEARDROP_ELASTIC


def test_three_arc_competitor_discrete_energy():
    rep = energies(three_arc_competitor(8401))
    assert abs(rep.elastic_energy - three_arc_elastic_energy()) < 1e-3


def test_cut_and_paste_additivity():
    piece = sample_analytic(serpent(), -16.0, 16.0, 4001)
    glued = cut_and_paste([piece, piece], [1.0])
    assert glued.kind.value == "truncated-complete"
    # junction and segment endpoints become breakpoints; piece breaks shift
    assert 32.0 in glued.breaks and 33.0 in glued.breaks
    total = energies(glued).energy
    assert abs(total - 2.0 * energies(piece).energy) < 1e-7


def test_cut_and_paste_rejects_bad_input():
    piece = sample_analytic(serpent(), -16.0, 16.0, 2001)
    with pytest.raises(AssemblyError, match="at least one piece"):
        cut_and_paste([], [])
    with pytest.raises(AssemblyError, match="one segment length per junction"):
        cut_and_paste([piece, piece], [])
    with pytest.raises(AssemblyError, match="nonnegative"):
        cut_and_paste([piece, piece], [-1.0])
    s = np.linspace(0.0, 1.0, 51)
    diagonal = ArcCurve(
        params=s,
        points=np.column_stack((s, s)) / math.sqrt(2.0),
        kind=CurveKind.OPEN_ARC,
    )
    with pytest.raises(AssemblyError, match="deviate from e1"):
        cut_and_paste([piece, diagonal], [0.0])


def test_sample_family_registry():
    c = sample_family("circle", n=101)
    assert c.is_closed and c.n_samples == 101
    with pytest.raises(ValueError, match="unknown family"):
        sample_family("helix")
