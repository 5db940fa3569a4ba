"""Self-check suites behind the ``verify`` CLI subcommand.

Four suites, each a list of named checks with expected value, computed
value, and tolerance:

* ``constants``    closed-form zoo constants against independent quadrature,
* ``identities``   exact relations (closed-curve direction energy, scaling,
                   gluing additivity, length/bending symmetry),
* ``bounds``       the energy lower bounds swept over the curve zoo,
* ``flow-smoke``   short integrations with known outcomes.

All suites are deterministic and run in seconds; the CLI turns a failed row
into exit code 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import (
    ArcCurve,
    CurveKind,
    sample_analytic,
    tangent_e1_total_variation,
    net_turning,
)
from .energy import analytic_energies, energies, rotation_lower_bound, turning_lower_bound
from .flow import FlowConfig, energy_decay_audit, new_state, run, step, velocity
from .geometry import is_embedded, self_intersections
from .shapes import (
    SERPENT_ENERGY,
    borderline,
    borderline_with_angle,
    circle,
    circle_curve,
    compute_teardrop_constants,
    cut_and_paste,
    figure_eight,
    figure_eight_analytic,
    figure_eight_scale_invariant_energy,
    pendant,
    pendant_analytic,
    pendant_total_energy,
    serpent,
    teardrop_elastic_energy,
    teardrop_length_bending,
    teardrop_loop,
    teardrop_rescaled,
    teardrop_rescaled_analytic,
    three_arc_analytic,
    three_arc_competitor,
    three_arc_elastic_energy,
    three_arc_length,
    two_teardrop,
    two_teardrop_analytic,
    two_teardrop_product_constant,
    wavelike,
)

__all__ = [
    "CheckResult",
    "SUITE_NAMES",
    "run_suite",
    "run_suites",
    "all_passed",
    "format_table",
]


@dataclass(frozen=True)
class CheckResult:
    """One verification row: got must match (or dominate) expected."""

    name: str
    relation: str  # "==" within tolerance, or ">=" minus tolerance
    expected: float
    got: float
    tolerance: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "relation": self.relation,
            "expected": self.expected,
            "got": self.got,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def _eq(name: str, expected: float, got: float, tol: float) -> CheckResult:
    return CheckResult(name, "==", float(expected), float(got),
                       float(tol), abs(got - expected) <= tol)


def _ge(name: str, floor: float, got: float, tol: float) -> CheckResult:
    return CheckResult(name, ">=", float(floor), float(got),
                       float(tol), got >= floor - tol)


# ---------------------------------------------------------------------------
# constants


def suite_constants() -> list[CheckResult]:
    out = []
    tc = compute_teardrop_constants()
    out.append(_eq("teardrop_modulus", 0.731183, tc.modulus, 1e-6))

    serp = analytic_energies(serpent(), -20.0, 20.0).energy
    out.append(_eq("serpent_energy", SERPENT_ENERGY, serp, 1e-8))

    bl = analytic_energies(borderline(), -20.0, 20.0).energy
    out.append(_eq("borderline_energy", 8.0, bl, 1e-8))
    for phi, label in (
        (math.pi / 6.0, "pi_over_6"),
        (math.pi / 3.0, "pi_over_3"),
        (math.pi / 2.0, "pi_over_2"),
        (2.0 * math.pi / 3.0, "two_pi_over_3"),
        (math.pi, "pi"),
    ):
        got = analytic_energies(borderline_with_angle(phi), 0.0, 20.0).energy
        want = 8.0 * math.sin(phi / 4.0) ** 2
        out.append(_eq("borderline_angle_energy_%s" % label, want, got, 1e-8))

    te = teardrop_elastic_energy()
    out.append(_eq("teardrop_elastic_energy", 8.563436, te, 1e-5))
    tre = analytic_energies(teardrop_rescaled_analytic(), 0.0, tc.arc_length)
    out.append(_eq("teardrop_quadrature_vs_closed_form", te, tre.elastic_energy, 1e-8))

    pend = analytic_energies(pendant_analytic(), -20.0, tc.arc_length + 20.0).energy
    out.append(_eq("pendant_energy", 10.906581, pend, 1e-5))
    out.append(_eq("pendant_decomposition", SERPENT_ENERGY + te, pend, 1e-8))

    x_end = math.pi - tc.alpha
    tt = analytic_energies(two_teardrop_analytic(), -x_end, 3.0 * x_end)
    prod = 2.0 * tt.length * tt.bending
    const = two_teardrop_product_constant()
    out.append(_eq("two_teardrop_product", 146.664860, prod, 1e-3))
    out.append(_eq("two_teardrop_product_identity", const, prod, 1e-6 * const))

    f8_closed = figure_eight_scale_invariant_energy()
    out.append(_eq("figure_eight_product", 14.995973, f8_closed, 1e-5))
    f8 = analytic_energies(figure_eight_analytic(), -math.pi / 2.0, 3.0 * math.pi / 2.0)
    f8_quad = 2.0 * math.sqrt(f8.length * f8.bending)
    out.append(_eq("figure_eight_quadrature_vs_closed_form", f8_closed, f8_quad, 1e-8))

    ta = analytic_energies(three_arc_analytic(), 0.0, three_arc_length())
    ta_closed = three_arc_elastic_energy()
    out.append(_eq("three_arc_elastic_energy", ta_closed, ta.elastic_energy, 1e-10))
    out.append(_ge("three_arc_exceeds_teardrop", 0.0, ta.elastic_energy - te, 0.0))

    # strict ordering of the threshold constants, each computed independently
    pair = 8.0 + circle().closed_form_energy
    out.append(_ge("chain_serpent_below_8", 0.0, 8.0 - serp, 1e-9))
    out.append(_ge("chain_8_below_pendant", 0.0, pend - 8.0, 1e-9))
    out.append(_ge("chain_pendant_below_figure_eight", 0.0, f8_quad - pend, 1e-9))
    out.append(_ge("chain_figure_eight_below_circle_pair", 0.0, pair - f8_quad, 1e-9))
    return out


# ---------------------------------------------------------------------------
# identities


def suite_identities() -> list[CheckResult]:
    out = []

    rep = energies(circle_curve(n=2001))
    out.append(_eq("circle_direction_vs_length", 0.0,
                   abs(rep.direction - rep.length), 1e-10))

    loop = energies(teardrop_loop(16001))
    out.append(_eq("teardrop_loop_direction_vs_length", 0.0,
                   abs(loop.direction - loop.length), 1e-8 * loop.length))
    out.append(_eq("teardrop_loop_energy", teardrop_elastic_energy(),
                   loop.energy, 1e-5))

    tt = energies(two_teardrop(8001))
    out.append(_eq("two_teardrop_direction_vs_length", 0.0,
                   abs(tt.direction - tt.length), 1e-8 * tt.length))

    f8 = energies(figure_eight(8001))
    out.append(_eq("figure_eight_direction_vs_length", 0.0,
                   abs(f8.direction - f8.length), 1e-8 * f8.length))

    lb_closed = teardrop_length_bending(rescaled=True)
    out.append(_eq("teardrop_rescaled_length_vs_bending_closed_form", 0.0,
                   abs(lb_closed[0] - lb_closed[1]), 1e-9))
    td = energies(teardrop_rescaled(16001))
    out.append(_eq("teardrop_rescaled_length_vs_bending", 0.0,
                   abs(td.length - td.bending), 1e-6))

    # L*B is invariant under homothety; the discrete stencils are degree
    # homogeneous, so this holds to roundoff, not just to O(h^2).
    samples = [
        ("wavelike_arc", sample_analytic(wavelike(0.6), -2.0, 2.0, 2001)),
        ("teardrop", teardrop_rescaled(4001)),
        ("figure_eight", figure_eight(4001)),
    ]
    for label, arc in samples:
        base = energies(arc)
        worst = 0.0
        for lam in (0.5, 2.0, 3.0):
            scaled = ArcCurve(arc.params * lam, arc.points * lam, kind=arc.kind)
            srep = energies(scaled)
            rel = abs(srep.length * srep.bending - base.length * base.bending)
            worst = max(worst, rel / (base.length * base.bending))
        out.append(_eq("scaling_invariance_%s" % label, 0.0, worst, 1e-9))

    out.extend(_cut_paste_rows())
    return out


def _cut_paste_rows() -> list[CheckResult]:
    # Splice a circle into the borderline at s = -16, where the tangent is
    # horizontal to ~5e-7: total energy must be the sum of the pieces.
    n = 16001
    bl = sample_analytic(borderline(), -20.0, 20.0, n)
    i_cut = 1600  # parameter -16.0 exactly on this grid
    left = ArcCurve(bl.params[: i_cut + 1], bl.points[: i_cut + 1])
    right = ArcCurve(bl.params[i_cut:], bl.points[i_cut:])

    circ = circle()
    loop_len = circ.domain[1]
    h = float(bl.params[1] - bl.params[0])
    n_loop = int(round(loop_len / h)) + 1
    loop_params = np.linspace(0.0, loop_len, n_loop)
    loop = ArcCurve(loop_params, circ.position(loop_params))

    glued = cut_and_paste([left, loop, right], [0.0, 0.0])
    total = energies(glued).energy
    parts = sum(energies(p).energy for p in (left, loop, right))
    pair = 8.0 + circ.closed_form_energy
    return [
        _eq("cut_paste_energy_additivity", 0.0, abs(total - parts), 1e-8),
        _eq("cut_paste_borderline_plus_circle", pair, total, 1e-4),
    ]


# ---------------------------------------------------------------------------
# bounds


def _zoo() -> list[tuple[str, ArcCurve]]:
    return [
        ("serpent", sample_analytic(serpent(), -16.0, 16.0, 8001)),
        ("borderline", sample_analytic(borderline(), -16.0, 16.0, 8001)),
        ("pendant", pendant(16.0, 12001)),
        ("figure_eight", figure_eight(8001)),
        ("three_arc", three_arc_competitor(4201)),
        ("circle", circle_curve(n=2001)),
    ]


def suite_bounds() -> list[CheckResult]:
    out = [
        _eq("turning_bound_at_zero", 0.0, turning_lower_bound(0.0), 0.0),
        _eq("turning_bound_at_half_turn", SERPENT_ENERGY,
            turning_lower_bound(math.pi), 1e-12),
        _eq("turning_bound_at_full_turn", 8.0,
            turning_lower_bound(2.0 * math.pi), 1e-12),
    ]

    zoo = _zoo()
    cs_margin = math.inf
    for label, c in zoo:
        rep = energies(c)
        total = rep.energy + rep.tail_bound
        # The bound takes the net curvature integral; cancelling swings are
        # free, so the angle's total variation would overstate the argument.
        turn = abs(net_turning(c))
        out.append(_ge("turning_bound_%s" % label, 0.0,
                       total - turning_lower_bound(turn), 1e-6))
        out.append(_ge("direction_variation_bound_%s" % label, 0.0,
                       total - tangent_e1_total_variation(c), 1e-6))
        cs_margin = min(cs_margin,
                        rep.elastic_energy
                        - 2.0 * math.sqrt(rep.length * rep.bending))
    arc = sample_analytic(wavelike(0.6), -2.0, 2.0, 2001)
    rep = energies(arc)
    cs_margin = min(cs_margin,
                    rep.elastic_energy - 2.0 * math.sqrt(rep.length * rep.bending))
    out.append(_ge("cauchy_schwarz_min_margin", 0.0, cs_margin, 1e-12))

    by_label = dict(zoo)
    bl = by_label["borderline"]
    bound, ok = rotation_lower_bound(bl)
    out.append(_eq("rotation_bound_borderline_value", 8.0, bound, 0.0))
    out.append(_ge("rotation_bound_borderline_satisfied", 1.0, float(ok), 0.0))
    rep_bl = energies(bl)
    out.append(_eq("rotation_bound_borderline_equality", 0.0,
                   abs(rep_bl.energy + rep_bl.tail_bound - 8.0), 1e-4))

    pend = by_label["pendant"]
    bound, ok = rotation_lower_bound(pend)
    out.append(_eq("rotation_bound_pendant_value", 0.0, bound, 0.0))
    out.append(_ge("rotation_bound_pendant_satisfied", 1.0, float(ok), 0.0))

    # classification spot checks feeding the threshold story
    serp_c = by_label["serpent"]
    out.append(_ge("serpent_embedded", 1.0, float(is_embedded(serp_c)), 0.0))

    bl_events = self_intersections(bl)
    out.append(_ge("borderline_crossing_detected", 1.0, float(len(bl_events)), 0.0))
    out.append(_ge("borderline_crossing_energy", 0.0,
                   rep_bl.energy + rep_bl.tail_bound - 8.0, 1e-4))

    pend_events = self_intersections(pend)
    tangential = any("tangential" in ev.classification for ev in pend_events)
    out.append(_ge("pendant_tangential_contact", 1.0, float(tangential), 0.0))
    rep_p = energies(pend)
    out.append(_ge("pendant_at_threshold", 0.0,
                   rep_p.energy + rep_p.tail_bound - pendant_total_energy(), 1e-4))
    return out


# ---------------------------------------------------------------------------
# flow smoke tests


def _line_row() -> CheckResult:
    # Dyadic spacing makes the discrete velocity of a line exactly zero; the
    # residual measures only the banded solve.
    h = 2.0 ** -4
    n = 257
    params = (np.arange(n) - (n - 1) / 2.0) * h
    pts = np.zeros((n, 2))
    pts[:, 0] = params
    c = ArcCurve(params, pts, kind=CurveKind.TRUNCATED_COMPLETE,
                 truncation_radius=8.0)
    config = FlowConfig(truncation_radius=8.0, n_grid=n, t_max=1.0,
                        redistribute_every=10 ** 9)
    state = new_state(c, config)
    worst = 0.0
    for _ in range(25):
        before = np.array(state.curve.points)
        step(state, config)
        worst = max(worst, float(np.abs(state.curve.points - before).max()))
    return _eq("line_step_displacement", 0.0, worst, 1e-12)


def _circle_rows() -> list[CheckResult]:
    rows = []
    for radius, label in ((1.0, "unit"), (1.0 / math.sqrt(2.0), "equilibrium")):
        ac = circle(radius)
        c = circle_curve(radius, 1001)
        vel = velocity(c)
        t = ac.tangent(c.params)
        normal = np.column_stack((-t[:, 1], t[:, 0]))
        factor = (1.0 / radius) * (1.0 - 1.0 / (2.0 * radius * radius))
        err = float(np.max(np.linalg.norm(vel - factor * normal, axis=1)))
        rows.append(_eq("circle_velocity_%s" % label, 0.0, err, 1e-3))
    return rows


def _borderline_row() -> CheckResult:
    c = sample_analytic(borderline(), -6.0, 6.0, 1201)
    config = FlowConfig(truncation_radius=6.0, n_grid=1201, dt=1e-5, t_max=1.0,
                        redistribute_every=10 ** 9)
    state = new_state(c, config)
    start = np.array(c.points)
    for _ in range(100):
        step(state, config)
    drift = float(np.max(np.linalg.norm(state.curve.points - start, axis=1)))
    return _eq("borderline_100_step_drift", 0.0, drift, 1e-3)


def _gaussian_rows() -> list[CheckResult]:
    xs = np.linspace(-8.0, 8.0, 1201)
    ys = 0.2 * np.exp(-xs * xs)
    c = ArcCurve(np.array(xs), np.column_stack((xs, ys)),
                 kind=CurveKind.TRUNCATED_COMPLETE, truncation_radius=8.0)
    config = FlowConfig(truncation_radius=8.0, n_grid=1201, t_max=2e-2,
                        redistribute_every=20, event_check_every=10 ** 9)
    state = run(c, config, stop=())
    rise, defect = energy_decay_audit(state)
    e_first = state.energy_history[0][1].energy
    e_last = state.energy_history[-1][1].energy
    drop = e_first - e_last
    return [
        _ge("gaussian_energy_drop", 0.0, drop, 0.0),
        _eq("gaussian_max_energy_rise", 0.0, rise, 1e-7),
        _eq("gaussian_dissipation_defect", 0.0, defect / max(drop, 1e-30), 0.02),
    ]


def suite_flow_smoke() -> list[CheckResult]:
    out = [_line_row()]
    out.extend(_circle_rows())
    out.append(_borderline_row())
    out.extend(_gaussian_rows())
    return out


# ---------------------------------------------------------------------------
# registry and formatting


_SUITES = {
    "constants": suite_constants,
    "identities": suite_identities,
    "bounds": suite_bounds,
    "flow-smoke": suite_flow_smoke,
}

SUITE_NAMES = tuple(_SUITES)


def run_suite(name: str) -> list[CheckResult]:
    """Run one named suite and return its check rows."""
    try:
        fn = _SUITES[name]
    except KeyError:
        raise ValueError(
            "unknown suite %r (have: %s)" % (name, ", ".join(SUITE_NAMES))
        ) from None
    return fn()


def run_suites(names: tuple[str, ...] | None = None) -> dict[str, list[CheckResult]]:
    """Run several suites (all by default), keyed by suite name."""
    return {name: run_suite(name) for name in (names or SUITE_NAMES)}


def all_passed(results: dict[str, list[CheckResult]]) -> bool:
    return all(row.passed for rows in results.values() for row in rows)


def format_table(name: str, rows: list[CheckResult]) -> str:
    """Fixed-width table of one suite's rows, full float precision."""
    cells = [("check", "expected", "got", "tolerance", "status")]
    for r in rows:
        expected = "%s %.17g" % (r.relation, r.expected)
        cells.append((r.name, expected, "%.17g" % r.got,
                      "%.17g" % r.tolerance, "pass" if r.passed else "FAIL"))
    widths = [max(len(row[i]) for row in cells) for i in range(5)]
    lines = []
    n_pass = sum(1 for r in rows if r.passed)
    lines.append("suite %s: %d/%d passed" % (name, n_pass, len(rows)))
    for j, row in enumerate(cells):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        if j == 0:
            lines.append("-" * (sum(widths) + 8))
    return "\n".join(lines)
