"""Closed-form curve constructions.

All planar curves here are either free elastica arcs (critical points of the
bending energy with a length multiplier) or explicit gluings of such arcs:

* the borderline elastica, a loop with horizontal tails, and its angled
  half, which leaves the origin at a prescribed angle below horizontal;
* the serpent, an odd C^{1,1} gluing of two angled halves;
* the wavelike family, parametrized by a modulus in (0, 1), including the
  teardrop (the member whose endpoints meet) and the closed figure-eight;
* the pendant, a teardrop loop rescaled to unit endpoint data and framed
  by two borderline-type tails;
* assorted comparison shapes (circle, line, a three-arc loop made of
  mutually tangent circles) and a cut-and-paste assembler.

Formulas are kept in one place so tests can probe them directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import PchipInterpolator

from .curves import (
    AnalyticCurve,
    ArcCurve,
    CurveKind,
    discrete_tangents,
    e1_vector,
    ends_horizontal,
    sample_analytic,
)
from .numerics import (
    adaptive_integrate,
    elliptic_FE_grid,
    find_root,
    incomplete_E,
    incomplete_F,
)

__all__ = [
    "AssemblyError",
    "SERPENT_ENERGY",
    "TeardropConstants",
    "borderline",
    "borderline_angle_shift",
    "borderline_with_angle",
    "serpent",
    "wavelike",
    "compute_teardrop_constants",
    "teardrop",
    "teardrop_rescaled_analytic",
    "teardrop_rescaled",
    "teardrop_loop",
    "two_teardrop_analytic",
    "two_teardrop",
    "two_teardrop_product_constant",
    "teardrop_length_bending",
    "teardrop_elastic_energy",
    "pendant_analytic",
    "pendant",
    "pendant_contact_params",
    "pendant_total_energy",
    "figure_eight_modulus",
    "figure_eight_analytic",
    "figure_eight",
    "figure_eight_scale_invariant_energy",
    "three_arc_analytic",
    "three_arc_competitor",
    "three_arc_length",
    "three_arc_elastic_energy",
    "circle",
    "circle_curve",
    "line",
    "cut_and_paste",
    "sample_family",
    "FAMILY_BUILDERS",
]


class AssemblyError(ValueError):
    """Pieces cannot be glued: junction data violates the assembly contract."""


SERPENT_ENERGY = 8.0 - 4.0 * math.sqrt(2.0)  # two quarter-angle tails


# ---------------------------------------------------------------------------
# borderline elastica: unit-speed loop with horizontal tails


def _sech(s: np.ndarray) -> np.ndarray:
    return 1.0 / np.cosh(s)


def borderline_position(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    return np.stack((s - 2.0 * np.tanh(s), 2.0 * _sech(s)), axis=-1)


def borderline_tangent(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    sech = _sech(s)
    return np.stack((1.0 - 2.0 * sech**2, -2.0 * sech * np.tanh(s)), axis=-1)


def borderline_curvature(s: np.ndarray) -> np.ndarray:
    return 2.0 * _sech(np.asarray(s, dtype=float))


def borderline_angle(s: np.ndarray) -> np.ndarray:
    """Tangent angle lift 4*arctan(e^s), increasing from 0 to 2*pi."""
    return 4.0 * np.arctan(np.exp(np.asarray(s, dtype=float)))


def borderline() -> AnalyticCurve:
    """The borderline elastica, arclength-parametrized over all of R."""
    return AnalyticCurve(
        family="borderline",
        params={},
        domain=(-math.inf, math.inf),
        kind=CurveKind.TRUNCATED_COMPLETE,
        position=borderline_position,
        tangent=borderline_tangent,
        curvature=borderline_curvature,
        closed_form_energy=8.0,
    )


def borderline_angle_shift(phi: float) -> float:
    """Arclength shift placing the tangent at angle -phi from horizontal."""
    if not (0.0 < phi <= math.pi):
        raise ValueError(f"phi={phi} outside (0, pi]")
    return math.log(1.0 / math.tan(phi / 4.0))


def borderline_with_angle(phi: float) -> AnalyticCurve:
    """Borderline half starting at the origin with tangent angle -phi.

    Defined on [0, inf); the far tangent flattens onto e1.  Its full energy
    has the closed form 8*sin^2(phi/4).
    """
    shift = borderline_angle_shift(phi)
    origin = borderline_position(shift)

    def position(s):
        return borderline_position(np.asarray(s, dtype=float) + shift) - origin

    def tangent(s):
        return borderline_tangent(np.asarray(s, dtype=float) + shift)

    def curvature(s):
        return borderline_curvature(np.asarray(s, dtype=float) + shift)

    return AnalyticCurve(
        family="borderline_angle",
        params={"phi": phi},
        domain=(0.0, math.inf),
        kind=CurveKind.OPEN_ARC,
        position=position,
        tangent=tangent,
        curvature=curvature,
        closed_form_energy=8.0 * math.sin(phi / 4.0) ** 2,
    )


def serpent() -> AnalyticCurve:
    """Odd gluing of two quarter-angle borderline halves.

    C^{1,1} across the origin: the tangent there is -e2 and the signed
    curvature jumps from -sqrt(2) to +sqrt(2).  Both tails are horizontal,
    approaching the lines y = -sqrt(2) (right) and y = +sqrt(2) (left).
    """
    half = borderline_with_angle(math.pi / 2.0)

    def position(s):
        s = np.asarray(s, dtype=float)
        p = half.position(np.abs(s))
        sign = np.where(s >= 0.0, 1.0, -1.0)
        return sign[..., None] * p

    def tangent(s):
        s = np.asarray(s, dtype=float)
        return half.tangent(np.abs(s))

    def curvature(s):
        s = np.asarray(s, dtype=float)
        k = half.curvature(np.abs(s))
        return np.where(s >= 0.0, k, -k)

    return AnalyticCurve(
        family="serpent",
        params={},
        domain=(-math.inf, math.inf),
        kind=CurveKind.TRUNCATED_COMPLETE,
        position=position,
        tangent=tangent,
        curvature=curvature,
        breaks=(0.0,),
        closed_form_energy=SERPENT_ENERGY,
    )


# ---------------------------------------------------------------------------
# wavelike family


def wavelike_position(x: np.ndarray, m: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    f, e = elliptic_FE_grid(x, m)
    return np.stack((2.0 * e - f, -2.0 * math.sqrt(m) * np.cos(x)), axis=-1)


def wavelike_tangent(x: np.ndarray, m: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    sx = np.sin(x)
    q = 1.0 - m * sx**2
    return np.stack((1.0 - 2.0 * m * sx**2, 2.0 * math.sqrt(m) * sx * np.sqrt(q)), axis=-1)


def wavelike_curvature(x: np.ndarray, m: float) -> np.ndarray:
    return 2.0 * math.sqrt(m) * np.cos(np.asarray(x, dtype=float))


def wavelike_speed(x: np.ndarray, m: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return 1.0 / np.sqrt(1.0 - m * np.sin(x) ** 2)


def wavelike(m: float) -> AnalyticCurve:
    """Wavelike elastica with modulus m in (0, 1), NOT arclength-parametrized.

    The parameter is the phase x; the speed is 1/sqrt(1 - m sin^2 x), so the
    arclength from 0 is exactly the first incomplete elliptic integral.
    Signed curvature is 2*sqrt(m)*cos(x).
    """
    if not (0.0 < m < 1.0):
        raise ValueError(f"modulus m={m} outside (0, 1)")
    return AnalyticCurve(
        family="wavelike",
        params={"m": m},
        domain=(-math.inf, math.inf),
        kind=CurveKind.OPEN_ARC,
        position=lambda x: wavelike_position(x, m),
        tangent=lambda x: wavelike_tangent(x, m),
        curvature=lambda x: wavelike_curvature(x, m),
        speed=lambda x: wavelike_speed(x, m),
    )


# ---------------------------------------------------------------------------
# teardrop


@dataclass(frozen=True)
class TeardropConstants:
    """Derived constants of the teardrop member of the wavelike family.

    Attributes:
        modulus: the modulus at which the wavelike arc closes up.
        alpha: phase cutoff, arcsin(sqrt(1/(2*modulus))); the arc lives on
            [-(pi - alpha), pi - alpha].
        rescale: sqrt(2*modulus - 1), the homothety making the endpoint
            curvature magnitude sqrt(2).
        endpoint_curvature: |curvature| at both ends after rescaling.
        arc_length: total length of the rescaled teardrop.
    """

    modulus: float
    alpha: float
    rescale: float
    endpoint_curvature: float
    arc_length: float

    def __post_init__(self) -> None:
        if not (0.5 < self.modulus < 1.0):
            raise ValueError("teardrop modulus must lie in (1/2, 1)")
        if self.arc_length <= 0.0:
            raise ValueError("arc_length must be positive")


def _teardrop_phase_cutoff(m: float) -> float:
    return math.asin(math.sqrt(1.0 / (2.0 * m)))


def _teardrop_closure_defect(m: float) -> float:
    # Horizontal displacement of the wavelike arc over [0, pi - alpha(m)];
    # the arc closes exactly when this vanishes.
    x_end = math.pi - _teardrop_phase_cutoff(m)

    def integrand(theta: float) -> float:
        s2 = math.sin(theta) ** 2
        return (1.0 - 2.0 * m * s2) / math.sqrt(1.0 - m * s2)

    return adaptive_integrate(integrand, 0.0, x_end, tol=1e-13).value


@lru_cache(maxsize=1)
def compute_teardrop_constants() -> TeardropConstants:
    """Solve for the teardrop modulus and package its derived constants."""
    m = find_root(_teardrop_closure_defect, 0.6, 0.9, tol=1e-13)
    alpha = _teardrop_phase_cutoff(m)
    rescale = math.sqrt(2.0 * m - 1.0)
    endpoint = math.sqrt(4.0 * m - 2.0) / rescale
    x_end = math.pi - alpha
    arc_length = 2.0 * rescale * incomplete_F(x_end, m, tol=1e-14)
    return TeardropConstants(
        modulus=m,
        alpha=alpha,
        rescale=rescale,
        endpoint_curvature=endpoint,
        arc_length=arc_length,
    )


def teardrop() -> AnalyticCurve:
    """The teardrop: the wavelike arc whose endpoints meet with opposite
    vertical tangents.  Phase-parametrized (not unit speed)."""
    tc = compute_teardrop_constants()
    m = tc.modulus
    x_end = math.pi - tc.alpha
    base = wavelike(m)
    return AnalyticCurve(
        family="teardrop",
        params={"m": m},
        domain=(-x_end, x_end),
        kind=CurveKind.OPEN_ARC,
        position=base.position,
        tangent=base.tangent,
        curvature=base.curvature,
        speed=base.speed,
    )


_TEARDROP_INVERSE_GRID = 20001


@lru_cache(maxsize=1)
def teardrop_rescaled_analytic() -> AnalyticCurve:
    """Rescaled teardrop, arclength-parametrized on [0, arc_length].

    The rescaling puts the endpoint curvature magnitude at sqrt(2) so the
    arc can continue into borderline-type tails.  The arclength inverse is
    built by monotone interpolation of the cumulative length.
    """
    tc = compute_teardrop_constants()
    m = tc.modulus
    lam = tc.rescale
    x_end = math.pi - tc.alpha
    x_dense = np.linspace(-x_end, x_end, _TEARDROP_INVERSE_GRID)
    f_dense, _ = elliptic_FE_grid(x_dense, m)
    s_dense = lam * (f_dense - f_dense[0])
    # Align the interpolant with the quadrature value of the total length.
    s_dense *= tc.arc_length / s_dense[-1]
    x_of_s = PchipInterpolator(s_dense, x_dense)

    def phase(s):
        s = np.clip(np.asarray(s, dtype=float), 0.0, tc.arc_length)
        return x_of_s(s)

    def position(s):
        return lam * wavelike_position(phase(s), m)

    def tangent(s):
        return wavelike_tangent(phase(s), m)

    def curvature(s):
        return wavelike_curvature(phase(s), m) / lam

    return AnalyticCurve(
        family="teardrop_rescaled",
        params={"m": m, "rescale": lam},
        domain=(0.0, tc.arc_length),
        kind=CurveKind.OPEN_ARC,
        position=position,
        tangent=tangent,
        curvature=curvature,
    )


def teardrop_rescaled(n: int = 16001) -> ArcCurve:
    """Unit-speed samples of the rescaled teardrop."""
    tc = compute_teardrop_constants()
    return sample_analytic(teardrop_rescaled_analytic(), 0.0, tc.arc_length, n)


def teardrop_loop(n: int = 16001) -> ArcCurve:
    """The rescaled teardrop read as a C0-closed loop.

    The closure is a corner (end tangents are opposite), so discrete
    operators treat the seam one-sided rather than periodically.
    """
    tc = compute_teardrop_constants()
    ac = teardrop_rescaled_analytic()
    grid = np.linspace(0.0, tc.arc_length, n)
    pts = np.asarray(ac.position(grid), dtype=float)
    pts[-1] = pts[0]
    return ArcCurve(params=grid, points=pts, kind=CurveKind.C0_CLOSED)


# ---------------------------------------------------------------------------
# two-teardrop: the teardrop followed by its point reflection


@lru_cache(maxsize=1)
def two_teardrop_analytic() -> AnalyticCurve:
    tc = compute_teardrop_constants()
    m = tc.modulus
    x_end = math.pi - tc.alpha
    vertex = wavelike_position(x_end, m)  # shared endpoint of both lobes

    def split(t):
        t = np.asarray(t, dtype=float)
        second = t > x_end
        x = np.where(second, t - 2.0 * x_end, t)
        return x, second

    def position(t):
        x, second = split(t)
        p = wavelike_position(x, m)
        return np.where(second[..., None], 2.0 * vertex - p, p)

    def tangent(t):
        x, second = split(t)
        tt = wavelike_tangent(x, m)
        return np.where(second[..., None], -tt, tt)

    def curvature(t):
        x, _ = split(t)
        return wavelike_curvature(x, m)

    def speed(t):
        x, _ = split(t)
        return wavelike_speed(x, m)

    return AnalyticCurve(
        family="two_teardrop",
        params={"m": m},
        domain=(-x_end, 3.0 * x_end),
        kind=CurveKind.C0_CLOSED,
        position=position,
        tangent=tangent,
        curvature=curvature,
        speed=speed,
        breaks=(x_end,),
    )


def two_teardrop(n: int = 8001) -> ArcCurve:
    """C0-closed double teardrop (phase-parametrized samples)."""
    tc = compute_teardrop_constants()
    x_end = math.pi - tc.alpha
    ac = two_teardrop_analytic()
    grid = np.linspace(-x_end, 3.0 * x_end, n)
    pts = np.asarray(ac.position(grid), dtype=float)
    pts[-1] = pts[0]  # exact closure (analytic defect ~1e-13)
    return ArcCurve(
        params=grid,
        points=pts,
        kind=CurveKind.C0_CLOSED,
        breaks=(x_end,),
    )


# ---------------------------------------------------------------------------
# pendant: tail + rescaled teardrop + mirrored tail


@lru_cache(maxsize=1)
def pendant_analytic() -> AnalyticCurve:
    """The pendant: a rescaled teardrop hanging from two horizontal tails.

    Branches (s is arclength, L the teardrop length):
      s <= 0: point reflection of the quarter-angle borderline half,
      0 <= s <= L: the rescaled teardrop, shifted to start at the origin,
      s >= L: the borderline half mirrored across the horizontal axis.
    The joints at s = 0 and s = L are C^2 (curvature -sqrt(2) on both
    sides); the curve touches itself tangentially at the origin, reached
    at s = 0 and s = L with opposite unit tangents.
    """
    tc = compute_teardrop_constants()
    lhat = tc.arc_length
    half = borderline_with_angle(math.pi / 2.0)
    tear = teardrop_rescaled_analytic()
    tear0 = tear.position(0.0)

    def position(s):
        s = np.asarray(s, dtype=float)
        out = np.empty(s.shape + (2,))
        left = s < 0.0
        right = s > lhat
        mid = ~(left | right)
        if np.any(left):
            out[left] = -half.position(-s[left])
        if np.any(mid):
            out[mid] = tear.position(s[mid]) - tear0
        if np.any(right):
            p = half.position(s[right] - lhat)
            p[..., 1] *= -1.0
            out[right] = p
        return out

    def tangent(s):
        s = np.asarray(s, dtype=float)
        out = np.empty(s.shape + (2,))
        left = s < 0.0
        right = s > lhat
        mid = ~(left | right)
        if np.any(left):
            out[left] = half.tangent(-s[left])
        if np.any(mid):
            out[mid] = tear.tangent(s[mid])
        if np.any(right):
            t = half.tangent(s[right] - lhat)
            t[..., 1] *= -1.0
            out[right] = t
        return out

    def curvature(s):
        s = np.asarray(s, dtype=float)
        out = np.empty(s.shape)
        left = s < 0.0
        right = s > lhat
        mid = ~(left | right)
        out[left] = -half.curvature(-s[left])
        out[mid] = tear.curvature(s[mid])
        out[right] = -half.curvature(s[right] - lhat)
        return out

    return AnalyticCurve(
        family="pendant",
        params={"teardrop_length": lhat},
        domain=(-math.inf, math.inf),
        kind=CurveKind.TRUNCATED_COMPLETE,
        position=position,
        tangent=tangent,
        curvature=curvature,
        breaks=(0.0, lhat),
    )


def teardrop_length_bending(rescaled: bool = False) -> tuple[float, float]:
    """(length, bending) of the teardrop from closed-form elliptic integrals.

    With rescaled=True the homothety that normalizes endpoint curvature is
    applied (length scales up, bending down; the product is invariant).
    """
    tc = compute_teardrop_constants()
    m = tc.modulus
    x_end = math.pi - tc.alpha
    f = incomplete_F(x_end, m, tol=1e-14)
    e = incomplete_E(x_end, m, tol=1e-14)
    length = 2.0 * f
    bending = 4.0 * (e - (1.0 - m) * f)
    if rescaled:
        return tc.rescale * length, bending / tc.rescale
    return length, bending


def teardrop_elastic_energy() -> float:
    """Bending + length of the rescaled teardrop, equal to 2*sqrt(L*B).

    The rescaling equalizes the two terms, which is exactly what minimizes
    bending + length over homotheties.
    """
    length, bending = teardrop_length_bending()
    return 2.0 * math.sqrt(length * bending)


def two_teardrop_product_constant() -> float:
    """2*L*B for the doubled teardrop loop (scale-invariant)."""
    length, bending = teardrop_length_bending()
    return 8.0 * length * bending


def pendant_total_energy() -> float:
    """Closed-form total energy: two quarter-angle tails plus the teardrop."""
    return SERPENT_ENERGY + teardrop_elastic_energy()


def pendant_contact_params() -> tuple[float, float]:
    """Arclength parameters of the tangential self-contact (0 and L)."""
    return 0.0, compute_teardrop_constants().arc_length


def pendant(truncation_radius: float = 20.0, n: int = 16001) -> ArcCurve:
    """Pendant samples on a uniform grid that hits both joints exactly.

    The spacing is a divisor of the teardrop length, so s = 0 and s = L are
    grid nodes; the realized tail radius is the closest multiple of the
    spacing to the requested one.
    """
    if truncation_radius <= 0.0:
        raise ValueError("truncation_radius must be positive")
    tc = compute_teardrop_constants()
    lhat = tc.arc_length
    span = 2.0 * truncation_radius + lhat
    k = max(8, round(lhat * (n - 1) / span))
    h = lhat / k
    m_tail = max(3, round(truncation_radius / h))
    idx = np.arange(-m_tail, k + m_tail + 1)
    params = idx * h
    ac = pendant_analytic()
    pts = np.asarray(ac.position(params), dtype=float)
    return ArcCurve(
        params=params,
        points=pts,
        kind=CurveKind.TRUNCATED_COMPLETE,
        truncation_radius=m_tail * h,
        breaks=(0.0, lhat),
    )


# ---------------------------------------------------------------------------
# figure-eight


@lru_cache(maxsize=1)
def figure_eight_modulus() -> float:
    """Modulus at which the wavelike half-period has zero net horizontal
    displacement, making one full period close into a figure-eight."""

    def closure(m: float) -> float:
        half = math.pi / 2.0
        return 2.0 * incomplete_E(half, m, tol=1e-14) - incomplete_F(half, m, tol=1e-14)

    return find_root(closure, 0.5, 0.95, tol=1e-13)


@lru_cache(maxsize=1)
def figure_eight_analytic() -> AnalyticCurve:
    m = figure_eight_modulus()
    base = wavelike(m)
    return AnalyticCurve(
        family="figure_eight",
        params={"m": m},
        domain=(-math.pi / 2.0, 3.0 * math.pi / 2.0),
        kind=CurveKind.C0_CLOSED,
        position=base.position,
        tangent=base.tangent,
        curvature=base.curvature,
        speed=base.speed,
    )


def figure_eight(n: int = 8001) -> ArcCurve:
    ac = figure_eight_analytic()
    grid = np.linspace(-math.pi / 2.0, 3.0 * math.pi / 2.0, n)
    pts = np.asarray(ac.position(grid), dtype=float)
    pts[-1] = pts[0]
    return ArcCurve(params=grid, points=pts, kind=CurveKind.C0_CLOSED)


def figure_eight_scale_invariant_energy() -> float:
    """Elastic energy of the figure-eight at its optimal rescaling.

    Equals 2*sqrt(length * bending), the minimum of bending/t + t*length
    over scale factors t, computed from complete elliptic integrals.
    """
    m = figure_eight_modulus()
    f, e = elliptic_FE_grid(np.array([math.pi / 2.0]), m)
    k_complete = float(f[0])
    e_complete = float(e[0])
    length = 4.0 * k_complete
    bending = 8.0 * (e_complete - (1.0 - m) * k_complete)
    return 2.0 * math.sqrt(length * bending)


# ---------------------------------------------------------------------------
# three-arc loop: circle arcs of curvature sqrt(2) glued tangentially


_THREE_ARC_RADIUS = 1.0 / math.sqrt(2.0)


def three_arc_length() -> float:
    return 7.0 * math.sqrt(2.0) * math.pi / 6.0


def three_arc_elastic_energy() -> float:
    # |curvature| = sqrt(2) everywhere, so the integrand of B + L is the
    # constant 2 and the elastic energy is twice the length.
    return 2.0 * three_arc_length()


def _rot90(v: np.ndarray) -> np.ndarray:
    return np.stack((-v[..., 1], v[..., 0]), axis=-1)


@lru_cache(maxsize=1)
def _three_arc_data():
    r = _THREE_ARC_RADIUS
    # Mutually tangent unit-configuration: centers on a circle of radius
    # 2r/sqrt(3), tangency points at the midpoints of the center pairs.
    circum = 2.0 * r / math.sqrt(3.0)
    angles = [math.pi / 2.0, math.pi / 2.0 + 2.0 * math.pi / 3.0, math.pi / 2.0 + 4.0 * math.pi / 3.0]
    o1, o2, o3 = (circum * np.array([math.cos(a), math.sin(a)]) for a in angles)
    point_a = 0.5 * (o1 + o2)
    point_b = 0.5 * (o2 + o3)
    point_c = 0.5 * (o3 + o1)

    arcs = []  # (center, start_angle, sweep) with |sweep|*r the arc length
    # Short arc A -> B on the circle around o2.
    phi_a = math.atan2(*(point_a - o2)[::-1])
    phi_b = math.atan2(*(point_b - o2)[::-1])
    sweep = (phi_b - phi_a + math.pi) % (2.0 * math.pi) - math.pi
    arcs.append((o2, phi_a, sweep))
    tano = math.copysign(1.0, sweep) * _rot90((point_b - o2) / r)

    # Long arc B -> C on the circle around o3, tangent-matched at B.
    phi_b3 = math.atan2(*(point_b - o3)[::-1])
    ccw = _rot90((point_b - o3) / r)
    sign = 1.0 if float(np.dot(ccw, tano)) > 0.0 else -1.0
    arcs.append((o3, phi_b3, sign * 5.0 * math.pi / 3.0))
    end = o3 + r * np.array([math.cos(phi_b3 + arcs[-1][2]), math.sin(phi_b3 + arcs[-1][2])])
    if not np.allclose(end, point_c, atol=1e-12):
        raise AssemblyError("three-arc long sweep does not land on the third joint")
    tano = sign * _rot90((point_c - o3) / r)

    # Short arc C -> A on the circle around o1, tangent-matched at C.
    phi_c1 = math.atan2(*(point_c - o1)[::-1])
    ccw = _rot90((point_c - o1) / r)
    sign = 1.0 if float(np.dot(ccw, tano)) > 0.0 else -1.0
    arcs.append((o1, phi_c1, sign * math.pi / 3.0))
    end = o1 + r * np.array([math.cos(phi_c1 + arcs[-1][2]), math.sin(phi_c1 + arcs[-1][2])])
    if not np.allclose(end, point_a, atol=1e-12):
        raise AssemblyError("three-arc closing sweep does not land on the start")
    return arcs


@lru_cache(maxsize=1)
def three_arc_analytic() -> AnalyticCurve:
    """Closed loop of three tangentially glued circle arcs of radius
    1/sqrt(2): short, long, short, with arc angles pi/3, 5pi/3, pi/3.

    Arclength-parametrized; C^{1,1} with curvature +-sqrt(2) flipping sign
    at the joints.  It starts and ends at the same point with opposite
    tangents.
    """
    r = _THREE_ARC_RADIUS
    arcs = _three_arc_data()
    seg_lengths = [abs(sweep) * r for _, _, sweep in arcs]
    bounds = np.concatenate(([0.0], np.cumsum(seg_lengths)))
    total = float(bounds[-1])

    def evaluate(s, want):
        s = np.clip(np.asarray(s, dtype=float), 0.0, total)
        out = np.empty(s.shape + (2,)) if want != "curvature" else np.empty(s.shape)
        piece = np.clip(np.searchsorted(bounds, s, side="right") - 1, 0, 2)
        for i, (center, phi0, sweep) in enumerate(arcs):
            mask = piece == i
            if not np.any(mask):
                continue
            sign = math.copysign(1.0, sweep)
            phi = phi0 + sign * (s[mask] - bounds[i]) / r
            radial = np.stack((np.cos(phi), np.sin(phi)), axis=-1)
            if want == "position":
                out[mask] = center + r * radial
            elif want == "tangent":
                out[mask] = sign * _rot90(radial)
            else:
                out[mask] = sign / r
        return out

    return AnalyticCurve(
        family="three_arc_competitor",
        params={"radius": r},
        domain=(0.0, total),
        kind=CurveKind.C0_CLOSED,
        position=lambda s: evaluate(s, "position"),
        tangent=lambda s: evaluate(s, "tangent"),
        curvature=lambda s: evaluate(s, "curvature"),
        breaks=(float(bounds[1]), float(bounds[2])),
        closed_form_energy=three_arc_elastic_energy(),
    )


def three_arc_competitor(n: int = 4201) -> ArcCurve:
    ac = three_arc_analytic()
    grid = np.linspace(ac.domain[0], ac.domain[1], n)
    pts = np.asarray(ac.position(grid), dtype=float)
    pts[-1] = pts[0]
    return ArcCurve(params=grid, points=pts, kind=CurveKind.C0_CLOSED, breaks=ac.breaks)


# ---------------------------------------------------------------------------
# elementary shapes


def circle(radius: float = 1.0 / math.sqrt(2.0)) -> AnalyticCurve:
    """Arclength-parametrized circle, starting at its lowest point heading
    along +e1 (counterclockwise)."""
    if radius <= 0.0:
        raise ValueError("radius must be positive")

    def angle(s):
        return np.asarray(s, dtype=float) / radius - math.pi / 2.0

    return AnalyticCurve(
        family="circle",
        params={"radius": radius},
        domain=(0.0, 2.0 * math.pi * radius),
        kind=CurveKind.C0_CLOSED,
        position=lambda s: radius * np.stack((np.cos(angle(s)), np.sin(angle(s))), axis=-1),
        tangent=lambda s: np.stack((-np.sin(angle(s)), np.cos(angle(s))), axis=-1),
        curvature=lambda s: np.full(np.asarray(s, dtype=float).shape, 1.0 / radius),
        closed_form_energy=math.pi / radius + 2.0 * math.pi * radius,
    )


def circle_curve(radius: float = 1.0 / math.sqrt(2.0), n: int = 2001) -> ArcCurve:
    ac = circle(radius)
    grid = np.linspace(0.0, 2.0 * math.pi * radius, n)
    pts = np.asarray(ac.position(grid), dtype=float)
    pts[-1] = pts[0]
    return ArcCurve(params=grid, points=pts, kind=CurveKind.C0_CLOSED)


def line(y_offset: float = 0.0) -> AnalyticCurve:
    """The horizontal line y = y_offset, arclength-parametrized."""
    return AnalyticCurve(
        family="line",
        params={"y_offset": y_offset},
        domain=(-math.inf, math.inf),
        kind=CurveKind.TRUNCATED_COMPLETE,
        position=lambda s: np.stack(
            (np.asarray(s, dtype=float), np.full(np.asarray(s, dtype=float).shape, y_offset)),
            axis=-1,
        ),
        tangent=lambda s: np.stack(
            (np.ones(np.asarray(s, dtype=float).shape), np.zeros(np.asarray(s, dtype=float).shape)),
            axis=-1,
        ),
        curvature=lambda s: np.zeros(np.asarray(s, dtype=float).shape),
        closed_form_energy=0.0,
    )


# ---------------------------------------------------------------------------
# cut and paste


def cut_and_paste(
    pieces: list[ArcCurve],
    segments: list[float],
    tol: float = 1e-6,
) -> ArcCurve:
    """Concatenate arcs, inserting horizontal segments between them.

    Every junction requires the outgoing tangent of one piece and the
    incoming tangent of the next to equal e1 within tol; the inserted
    segment (possibly of zero length) then continues along e1, so the total
    energy is the sum of the piece energies.  Pieces after the first are
    translated; junction parameters become breakpoints.
    """
    if len(pieces) < 1:
        raise AssemblyError("need at least one piece")
    if len(segments) != len(pieces) - 1:
        raise AssemblyError("need exactly one segment length per junction")
    if any(length < 0.0 for length in segments):
        raise AssemblyError("segment lengths must be nonnegative")
    dim = pieces[0].dim
    if any(p.dim != dim for p in pieces):
        raise AssemblyError("mixed ambient dimensions")
    e1 = e1_vector(dim)

    for left, right in zip(pieces[:-1], pieces[1:]):
        t_left, _ = discrete_tangents(left)
        t_right, _ = discrete_tangents(right)
        d_out = float(np.linalg.norm(t_left[-1] - e1))
        d_in = float(np.linalg.norm(t_right[0] - e1))
        if d_out > tol or d_in > tol:
            raise AssemblyError(
                f"junction tangents deviate from e1 by {d_out:.2e} / {d_in:.2e} (tol {tol:.1e})"
            )

    first = pieces[0]
    params = [first.params - first.params[0]]
    points = [np.array(first.points)]
    breaks: list[float] = [b - first.params[0] for b in first.breaks]
    for piece, seg_len in zip(pieces[1:], segments):
        cur_p = params[-1][-1]
        cur_pt = points[-1][-1]
        breaks.append(float(cur_p))
        if seg_len > 0.0:
            h_local = float(np.median(np.diff(params[-1][-8:]))) if params[-1].size > 8 else seg_len
            n_seg = max(2, int(math.ceil(seg_len / max(h_local, 1e-12))))
            frac = np.arange(1, n_seg + 1) / n_seg
            params.append(cur_p + seg_len * frac)
            points.append(cur_pt + np.outer(seg_len * frac, e1))
            cur_p = params[-1][-1]
            cur_pt = points[-1][-1]
            breaks.append(float(cur_p))
        shift = cur_pt - piece.points[0]
        params.append(cur_p + (piece.params[1:] - piece.params[0]))
        points.append(piece.points[1:] + shift)
        breaks.extend(cur_p + (b - piece.params[0]) for b in piece.breaks)

    full_params = np.concatenate(params)
    full_points = np.vstack(points)
    assembled = ArcCurve(
        params=full_params,
        points=full_points,
        kind=CurveKind.OPEN_ARC,
        breaks=tuple(sorted(set(breaks))),
    )
    horizontal, _ = ends_horizontal(assembled, tol)
    if horizontal:
        assembled = ArcCurve(
            params=full_params,
            points=full_points,
            kind=CurveKind.TRUNCATED_COMPLETE,
            truncation_radius=float(max(abs(full_params[0]), abs(full_params[-1]))),
            breaks=assembled.breaks,
        )
    return assembled


# ---------------------------------------------------------------------------
# family registry for sampling by name


def _builder_borderline(R=20.0, n=16001, **kw):
    return sample_analytic(borderline(), -R, R, int(n))


def _builder_borderline_angle(phi=math.pi / 2.0, R=20.0, n=16001, **kw):
    return sample_analytic(borderline_with_angle(float(phi)), 0.0, R, int(n))


def _builder_serpent(R=20.0, n=16001, **kw):
    return sample_analytic(serpent(), -R, R, int(n))


def _builder_wavelike(m=0.6, a=-math.pi, b=math.pi, n=8001, **kw):
    return sample_analytic(wavelike(float(m)), float(a), float(b), int(n))


def _builder_teardrop(n=8001, **kw):
    tc = compute_teardrop_constants()
    x_end = math.pi - tc.alpha
    return sample_analytic(teardrop(), -x_end, x_end, int(n))


def _builder_teardrop_rescaled(n=16001, **kw):
    return teardrop_rescaled(int(n))


def _builder_two_teardrop(n=8001, **kw):
    return two_teardrop(int(n))


def _builder_pendant(R=20.0, n=16001, **kw):
    return pendant(float(R), int(n))


def _builder_figure_eight(n=8001, **kw):
    return figure_eight(int(n))


def _builder_three_arc(n=4201, **kw):
    return three_arc_competitor(int(n))


def _builder_circle(radius=1.0 / math.sqrt(2.0), n=2001, **kw):
    return circle_curve(float(radius), int(n))


def _builder_line(length=40.0, n=2001, y=0.0, **kw):
    return sample_analytic(line(float(y)), -float(length) / 2.0, float(length) / 2.0, int(n))


FAMILY_BUILDERS = {
    "borderline": _builder_borderline,
    "borderline_angle": _builder_borderline_angle,
    "serpent": _builder_serpent,
    "wavelike": _builder_wavelike,
    "teardrop": _builder_teardrop,
    "teardrop_rescaled": _builder_teardrop_rescaled,
    "two_teardrop": _builder_two_teardrop,
    "pendant": _builder_pendant,
    "figure_eight": _builder_figure_eight,
    "three_arc_competitor": _builder_three_arc,
    "circle": _builder_circle,
    "line": _builder_line,
}


def sample_family(family: str, **kwargs) -> ArcCurve:
    """Build a named family member with keyword overrides (R, n, m, ...)."""
    try:
        builder = FAMILY_BUILDERS[family]
    except KeyError:
        raise ValueError(
            f"unknown family {family!r}; choose from {sorted(FAMILY_BUILDERS)}"
        ) from None
    return builder(**kwargs)
