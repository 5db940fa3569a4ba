"""Curve containers and discrete differential geometry.

Two representations are used throughout:

* ``AnalyticCurve``: closed-form position/tangent/curvature evaluators on a
  parameter interval, vectorized over numpy arrays.
* ``ArcCurve``: an immutable sampled curve, parameter values together with
  sample points, plus the metadata needed to interpret it (kind, tail
  direction, truncation radius, reduced-smoothness breakpoints).

Discrete tangents use three-point finite differences (centered in the
interior, one-sided second order at ends), applied piecewise between
breakpoints so stencils never straddle a curvature jump.  Closed curves
without breakpoints get periodic stencils.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

__all__ = [
    "CurveKind",
    "ArcCurve",
    "AnalyticCurve",
    "AngleFunction",
    "LiftError",
    "UnderResolvedError",
    "DegenerateSegmentError",
    "sample_analytic",
    "reparametrize_arclength",
    "discrete_tangents",
    "discrete_curvature_vectors",
    "field_derivative",
    "piece_geometry",
    "piece_index_ranges",
    "tangent_angle",
    "signed_curvature",
    "rotation_number",
    "rounded_rotation_number",
    "net_turning",
    "total_absolute_turning",
    "tangent_e1_total_variation",
    "ends_horizontal",
    "write_curve",
    "read_curve",
    "e1_vector",
]

_CLOSURE_RTOL = 1e-12  # closure defect allowance, relative to diameter


class LiftError(RuntimeError):
    """A continuous angle lift failed: neighboring tangents turn by >= pi."""


class UnderResolvedError(RuntimeError):
    """Samples are too sparse for the requested discrete operation."""


class DegenerateSegmentError(ValueError):
    """Consecutive samples coincide."""


class CurveKind(str, enum.Enum):
    TRUNCATED_COMPLETE = "truncated-complete"
    C0_CLOSED = "c0-closed"
    OPEN_ARC = "open-arc"


def e1_vector(dim: int) -> np.ndarray:
    v = np.zeros(dim)
    v[0] = 1.0
    return v


def _frozen_array(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ArcCurve:
    """A sampled curve: parameter grid, points, and interpretation metadata.

    Attributes:
        params: strictly increasing parameter values, shape (N,).  For
            arclength-parametrized curves these are length units.
        points: sample positions, shape (N, dim), dim >= 2.
        kind: how the samples should be read (truncated tails, C0-closed
            loop, or a plain compact arc).
        tail_direction: unit direction of the suppressed tails (meaningful
            for truncated-complete curves); defaults to e1.
        truncation_radius: parameter radius at which tails were cut, or None.
        breaks: parameter values of reduced smoothness (gluing points).
            Discrete stencils never straddle a break.
    """

    params: np.ndarray
    points: np.ndarray
    kind: CurveKind = CurveKind.OPEN_ARC
    tail_direction: np.ndarray | None = None
    truncation_radius: float | None = None
    breaks: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        params = _frozen_array(self.params)
        points = _frozen_array(self.points)
        if params.ndim != 1 or points.ndim != 2:
            raise ValueError("params must be 1-D and points 2-D")
        if points.shape[0] != params.shape[0]:
            raise ValueError("params and points lengths differ")
        if params.shape[0] < 2:
            raise ValueError("need at least two samples")
        if points.shape[1] < 2:
            raise ValueError("ambient dimension must be >= 2")
        if not np.all(np.diff(params) > 0.0):
            raise ValueError("params must be strictly increasing")
        seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
        if not np.all(seg > 0.0):
            raise DegenerateSegmentError("consecutive points coincide")
        kind = CurveKind(self.kind)
        tail = self.tail_direction
        if tail is None:
            tail = e1_vector(points.shape[1])
        tail = _frozen_array(tail)
        if tail.shape != (points.shape[1],):
            raise ValueError("tail_direction dimension mismatch")
        if kind is CurveKind.C0_CLOSED:
            defect = float(np.linalg.norm(points[0] - points[-1]))
            diam = _bbox_diameter(points)
            if defect > _CLOSURE_RTOL * diam:
                raise ValueError(
                    f"c0-closed curve has closure defect {defect:.3e} "
                    f"(allowed {_CLOSURE_RTOL * diam:.3e})"
                )
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "tail_direction", tail)
        object.__setattr__(self, "breaks", tuple(float(b) for b in self.breaks))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_samples(self) -> int:
        return self.params.shape[0]

    @property
    def diameter(self) -> float:
        return _bbox_diameter(self.points)

    @property
    def segment_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.points, axis=0), axis=1)

    @property
    def is_closed(self) -> bool:
        return self.kind is CurveKind.C0_CLOSED

    def with_points(self, points: np.ndarray) -> "ArcCurve":
        return replace(self, points=points)


def _bbox_diameter(points: np.ndarray) -> float:
    ext = points.max(axis=0) - points.min(axis=0)
    d = float(np.linalg.norm(ext))
    return d if d > 0.0 else 1.0


@dataclass(frozen=True)
class AnalyticCurve:
    """A curve family member given by closed-form evaluators.

    ``position``, ``tangent`` (unit), and ``curvature`` (signed, planar)
    accept scalars or numpy arrays of parameters.  ``speed`` is None for
    arclength parametrizations, otherwise |dposition/dparam|.  The energy
    of the full curve is attached when a closed form is known.
    """

    family: str
    params: dict
    domain: tuple[float, float]
    kind: CurveKind
    position: Callable[[np.ndarray], np.ndarray]
    tangent: Callable[[np.ndarray], np.ndarray]
    curvature: Callable[[np.ndarray], np.ndarray]
    speed: Callable[[np.ndarray], np.ndarray] | None = None
    breaks: tuple[float, ...] = ()
    closed_form_energy: float | None = None

    def speed_at(self, s: np.ndarray) -> np.ndarray:
        if self.speed is None:
            return np.ones_like(np.asarray(s, dtype=float))
        return self.speed(s)


@dataclass(frozen=True)
class AngleFunction:
    """A continuous tangent-angle lift sampled on a parameter grid."""

    params: np.ndarray
    theta: np.ndarray

    def __post_init__(self) -> None:
        params = _frozen_array(self.params)
        theta = _frozen_array(self.theta)
        if params.shape != theta.shape:
            raise ValueError("params/theta shape mismatch")
        steps = np.abs(np.diff(theta))
        if steps.size and float(steps.max()) >= math.pi:
            raise LiftError("angle lift has a step >= pi between samples")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "theta", theta)

    @property
    def total_turning(self) -> float:
        return float(self.theta[-1] - self.theta[0])


# ---------------------------------------------------------------------------
# finite-difference stencils


def _lagrange_weights_3(t0: float, t1: float, t2: float, x: float) -> tuple[float, float, float]:
    # Derivative at x of the quadratic through (t0, t1, t2).
    d0 = (2.0 * x - t1 - t2) / ((t0 - t1) * (t0 - t2))
    d1 = (2.0 * x - t0 - t2) / ((t1 - t0) * (t1 - t2))
    d2 = (2.0 * x - t0 - t1) / ((t2 - t0) * (t2 - t1))
    return d0, d1, d2


def _derivative(params: np.ndarray, values: np.ndarray) -> np.ndarray:
    """First derivative of sampled values, second order on smooth grids.

    values may be (N,) or (N, dim).
    """
    t = params
    y = values if values.ndim == 2 else values[:, None]
    n = t.shape[0]
    if n < 3:
        raise UnderResolvedError("need at least 3 samples for a derivative")
    out = np.empty_like(y)
    h1 = (t[1:-1] - t[:-2])[:, None]
    h2 = (t[2:] - t[1:-1])[:, None]
    a = h1 / (h2 * (h1 + h2))
    b = -h2 / (h1 * (h1 + h2))
    out[1:-1] = a * y[2:] + b * y[:-2] - (a + b) * y[1:-1]
    w = _lagrange_weights_3(t[0], t[1], t[2], t[0])
    out[0] = w[0] * y[0] + w[1] * y[1] + w[2] * y[2]
    w = _lagrange_weights_3(t[-3], t[-2], t[-1], t[-1])
    out[-1] = w[0] * y[-3] + w[1] * y[-2] + w[2] * y[-1]
    return out if values.ndim == 2 else out[:, 0]


def _derivative_periodic(params: np.ndarray, values: np.ndarray, period: float) -> np.ndarray:
    """Centered first derivative on a periodic grid (no duplicate endpoint)."""
    t = params
    y = values if values.ndim == 2 else values[:, None]
    tp = np.concatenate((t, [t[0] + period]))
    gaps = np.diff(tp)
    h1 = np.roll(gaps, 1)[:, None]
    h2 = gaps[:, None]
    a = h1 / (h2 * (h1 + h2))
    b = -h2 / (h1 * (h1 + h2))
    out = a * np.roll(y, -1, axis=0) + b * np.roll(y, 1, axis=0) - (a + b) * y
    return out if values.ndim == 2 else out[:, 0]


def _second_derivative(params: np.ndarray, values: np.ndarray) -> np.ndarray:
    t = params
    y = values if values.ndim == 2 else values[:, None]
    n = t.shape[0]
    if n < 3:
        raise UnderResolvedError("need at least 3 samples for a second derivative")
    out = np.empty_like(y)
    h1 = (t[1:-1] - t[:-2])[:, None]
    h2 = (t[2:] - t[1:-1])[:, None]
    out[1:-1] = 2.0 * (
        y[:-2] / (h1 * (h1 + h2)) - y[1:-1] / (h1 * h2) + y[2:] / (h2 * (h1 + h2))
    )
    if n >= 4:
        out[0] = _one_sided_second(t[:4], y[:4], t[0])
        out[-1] = _one_sided_second(t[-4:], y[-4:], t[-1])
    else:
        out[0] = out[1]
        out[-1] = out[-2]
    return out if values.ndim == 2 else out[:, 0]


def _second_derivative_periodic(params: np.ndarray, values: np.ndarray, period: float) -> np.ndarray:
    t = params
    y = values if values.ndim == 2 else values[:, None]
    tp = np.concatenate((t, [t[0] + period]))
    gaps = np.diff(tp)
    h1 = np.roll(gaps, 1)[:, None]
    h2 = gaps[:, None]
    out = 2.0 * (
        np.roll(y, 1, axis=0) / (h1 * (h1 + h2))
        - y / (h1 * h2)
        + np.roll(y, -1, axis=0) / (h2 * (h1 + h2))
    )
    return out if values.ndim == 2 else out[:, 0]


def _one_sided_second(t4: np.ndarray, y4: np.ndarray, x: float) -> np.ndarray:
    # Second derivative at x of the cubic through four samples.
    w = np.empty(4)
    for i in range(4):
        others = [t4[j] for j in range(4) if j != i]
        denom = np.prod([t4[i] - o for o in others])
        w[i] = 2.0 * (3.0 * x - sum(others)) / denom
    return (w[:, None] * y4).sum(axis=0)


# ---------------------------------------------------------------------------
# piecewise assembly helpers


def piece_index_ranges(c: ArcCurve) -> list[tuple[int, int]]:
    """Inclusive index ranges of the smooth pieces delimited by breaks.

    Breaks are snapped to the nearest sample; each piece keeps its boundary
    nodes, so neighboring pieces share a node.
    """
    n = c.n_samples
    if not c.breaks:
        return [(0, n - 1)]
    cuts = []
    for b in c.breaks:
        i = int(np.argmin(np.abs(c.params - b)))
        if 0 < i < n - 1:
            cuts.append(i)
    cuts = sorted(set(cuts))
    bounds = [0] + cuts + [n - 1]
    ranges = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if hi - lo + 1 < 3:
            raise UnderResolvedError(
                f"piece [{c.params[lo]}, {c.params[hi]}] has fewer than 3 samples"
            )
        ranges.append((lo, hi))
    return ranges


def _is_periodic_case(c: ArcCurve) -> bool:
    if not (c.is_closed and not c.breaks):
        return False
    # Wraparound stencils are only valid when the seam is C1.  A corner
    # closure (e.g. a loop whose end tangents are opposite) must fall back
    # to one-sided ends, so sniff the chord directions at the seam.
    first = c.points[1] - c.points[0]
    last = c.points[-1] - c.points[-2]
    denom = float(np.linalg.norm(first) * np.linalg.norm(last))
    return float(np.dot(first, last)) > denom * math.cos(math.pi / 6.0)


def discrete_tangents(c: ArcCurve) -> tuple[np.ndarray, np.ndarray]:
    """Unit tangents and speeds at every sample.

    Returns (T, speed) with T of shape (N, dim).  At a break node the
    right-hand piece wins (the left-limit tangent agrees for C1 data).
    """
    if _is_periodic_case(c):
        t = c.params[:-1]
        y = c.points[:-1]
        period = float(c.params[-1] - c.params[0])
        d = _derivative_periodic(t, y, period)
        d = np.vstack((d, d[:1]))
    else:
        d = np.empty_like(c.points)
        for lo, hi in reversed(piece_index_ranges(c)):
            sl = slice(lo, hi + 1)
            d[sl] = _derivative(c.params[sl], c.points[sl])
    speed = np.linalg.norm(d, axis=1)
    if np.any(speed <= 0.0):
        raise DegenerateSegmentError("vanishing discrete speed")
    return d / speed[:, None], speed


def discrete_curvature_vectors(c: ArcCurve) -> np.ndarray:
    """Curvature vectors (second arclength derivative of position)."""
    if _is_periodic_case(c):
        t = c.params[:-1]
        y = c.points[:-1]
        period = float(c.params[-1] - c.params[0])
        d1 = _derivative_periodic(t, y, period)
        d2 = _second_derivative_periodic(t, y, period)
        d1 = np.vstack((d1, d1[:1]))
        d2 = np.vstack((d2, d2[:1]))
    else:
        d1 = np.empty_like(c.points)
        d2 = np.empty_like(c.points)
        for lo, hi in piece_index_ranges(c):
            sl = slice(lo, hi + 1)
            d1[sl] = _derivative(c.params[sl], c.points[sl])
            d2[sl] = _second_derivative(c.params[sl], c.points[sl])
    v2 = np.einsum("ij,ij->i", d1, d1)
    proj = np.einsum("ij,ij->i", d1, d2) / v2
    return (d2 - proj[:, None] * d1) / v2[:, None]


def piece_geometry(
    c: ArcCurve,
) -> list[tuple[int, int, np.ndarray, np.ndarray, np.ndarray]]:
    """Discrete geometry piece by piece: (lo, hi, T, speed, kappa).

    Unlike the merged arrays of discrete_tangents/discrete_curvature_vectors,
    a node shared by two pieces appears in both entries with its own-sided
    limit values, which is what piecewise quadrature needs.
    """
    if _is_periodic_case(c):
        tangents, speed = discrete_tangents(c)
        kappa = discrete_curvature_vectors(c)
        return [(0, c.n_samples - 1, tangents, speed, kappa)]
    out = []
    for lo, hi in piece_index_ranges(c):
        sl = slice(lo, hi + 1)
        d1 = _derivative(c.params[sl], c.points[sl])
        d2 = _second_derivative(c.params[sl], c.points[sl])
        speed = np.linalg.norm(d1, axis=1)
        if np.any(speed <= 0.0):
            raise DegenerateSegmentError("vanishing discrete speed")
        tangents = d1 / speed[:, None]
        v2 = speed**2
        proj = np.einsum("ij,ij->i", d1, d2) / v2
        kappa = (d2 - proj[:, None] * d1) / v2[:, None]
        out.append((lo, hi, tangents, speed, kappa))
    return out


def field_derivative(c: ArcCurve, values: np.ndarray) -> np.ndarray:
    """Parameter derivative of a field sampled on the curve's grid.

    Uses the same piecewise/periodic stencil policy as the position
    operators, so derived fields (curvature, velocity terms) differentiate
    consistently with the geometry.  values may be (N,) or (N, k).
    """
    values = np.asarray(values, dtype=float)
    if values.shape[0] != c.n_samples:
        raise ValueError("field length does not match sample count")
    if _is_periodic_case(c):
        period = float(c.params[-1] - c.params[0])
        d = _derivative_periodic(c.params[:-1], values[:-1], period)
        return np.concatenate((d, d[:1]), axis=0)
    out = np.empty_like(values)
    for lo, hi in reversed(piece_index_ranges(c)):
        sl = slice(lo, hi + 1)
        out[sl] = _derivative(c.params[sl], values[sl])
    return out


def _lift_increments(tangents: np.ndarray) -> np.ndarray:
    cross = tangents[:-1, 0] * tangents[1:, 1] - tangents[:-1, 1] * tangents[1:, 0]
    dot = np.einsum("ij,ij->i", tangents[:-1], tangents[1:])
    inc = np.arctan2(cross, dot)
    if inc.size and float(np.abs(inc).max()) >= math.pi - 1e-9:
        raise LiftError("tangent turns by >= pi between neighboring samples")
    return inc


def tangent_angle(c: ArcCurve) -> AngleFunction:
    """Continuous lift of the planar tangent angle, theta(start) in (-pi, pi].

    Raises LiftError when neighboring tangents turn by pi or more, which
    signals an under-resolved curve.
    """
    if c.dim != 2:
        raise ValueError("tangent_angle is planar only")
    tangents, _ = discrete_tangents(c)
    theta0 = math.atan2(tangents[0, 1], tangents[0, 0])
    if theta0 <= -math.pi:
        theta0 += 2.0 * math.pi
    inc = _lift_increments(tangents)
    theta = theta0 + np.concatenate(([0.0], np.cumsum(inc)))
    return AngleFunction(c.params, theta)


def rotation_number(c: ArcCurve) -> float:
    """Total signed turning divided by 2*pi.

    For a C0-closed curve the lift is taken around the loop including the
    closing step, so smooth closed curves give near-integer values.
    """
    if c.dim != 2:
        raise ValueError("rotation_number is planar only")
    tangents, _ = discrete_tangents(c)
    if c.is_closed:
        ring = np.vstack((tangents[:-1], tangents[:1]))
        inc = _lift_increments(ring)
        return float(inc.sum() / (2.0 * math.pi))
    inc = _lift_increments(tangents)
    return float(inc.sum() / (2.0 * math.pi))


def rounded_rotation_number(c: ArcCurve) -> tuple[int, float]:
    """Nearest-integer rotation number and the rounding residual."""
    raw = rotation_number(c)
    n = int(round(raw))
    return n, abs(raw - n)


def net_turning(c: ArcCurve) -> float:
    """Signed net turning: the end-to-end change of the lifted angle, in
    radians.  Equals 2*pi times the rotation number.

    This is the curvature integral, not its total variation: swings that
    cancel contribute nothing.  The energy lower bound is stated in terms
    of its absolute value.
    """
    return 2.0 * math.pi * rotation_number(c)


def total_absolute_turning(c: ArcCurve) -> float:
    """Total variation of the tangent angle over the samples, in radians.

    Closed curves include the seam step.  Sampling underestimates the
    continuum value (each increment is a net angle).  Unlike net_turning
    this is not a quantity the energy controls: many small swings can
    accumulate arbitrary variation at arbitrarily small energy.
    """
    if c.dim != 2:
        raise ValueError("total_absolute_turning is planar only")
    tangents, _ = discrete_tangents(c)
    if c.is_closed:
        tangents = np.vstack((tangents[:-1], tangents[:1]))
    inc = _lift_increments(tangents)
    return float(np.abs(inc).sum())


def _arclength_samples(c: ArcCurve) -> np.ndarray:
    _, speed = discrete_tangents(c)
    ds = 0.5 * (speed[1:] + speed[:-1]) * np.diff(c.params)
    return np.concatenate(([0.0], np.cumsum(ds)))


def signed_curvature(c: ArcCurve) -> np.ndarray:
    """Signed planar curvature: derivative of the lifted angle in arclength.

    Second-order accurate on uniform grids.  At a break node the value is
    the right-hand limit.
    """
    if c.dim != 2:
        raise ValueError("signed_curvature is planar only")
    if _is_periodic_case(c):
        tangents, speed = discrete_tangents(c)
        inc = _lift_increments(np.vstack((tangents[:-1], tangents[:1])))
        theta = np.concatenate(([0.0], np.cumsum(inc)))
        s = _arclength_samples(c)
        period = float(s[-1])
        k = _derivative_periodic(s[:-1], theta[:-1], period)
        return np.concatenate((k, k[:1]))
    s = _arclength_samples(c)
    out = np.empty(c.n_samples)
    for lo, hi in reversed(piece_index_ranges(c)):
        sl = slice(lo, hi + 1)
        piece = ArcCurve(c.params[sl], c.points[sl])
        tangents, _ = discrete_tangents(piece)
        theta = np.concatenate(([0.0], np.cumsum(_lift_increments(tangents))))
        out[sl] = _derivative(s[sl], theta)
    return out


def tangent_e1_total_variation(c: ArcCurve) -> float:
    """Total variation of <T, e1) over the samples."""
    tangents, _ = discrete_tangents(c)
    e1 = e1_vector(c.dim)
    comp = tangents @ e1
    return float(np.abs(np.diff(comp)).sum())


def ends_horizontal(c: ArcCurve, tol: float = 1e-6) -> tuple[bool, tuple[float, float]]:
    """Whether both end tangents align with e1 within tol (vector norm)."""
    tangents, _ = discrete_tangents(c)
    e1 = e1_vector(c.dim)
    d0 = float(np.linalg.norm(tangents[0] - e1))
    d1 = float(np.linalg.norm(tangents[-1] - e1))
    return (d0 <= tol and d1 <= tol), (d0, d1)


# ---------------------------------------------------------------------------
# sampling and reparametrization


def sample_analytic(ac: AnalyticCurve, a: float, b: float, n: int) -> ArcCurve:
    """Sample an analytic curve on a uniform parameter grid of n points."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if not (a < b):
        raise ValueError("need a < b")
    lo, hi = ac.domain
    eps = 1e-9 * max(1.0, abs(a), abs(b))
    if a < lo - eps or b > hi + eps:
        raise ValueError(f"[{a}, {b}] outside domain [{lo}, {hi}] of {ac.family}")
    grid = np.linspace(a, b, n)
    pts = np.asarray(ac.position(grid), dtype=float)
    if pts.shape[0] != n:
        pts = pts.T
    breaks = tuple(x for x in ac.breaks if a < x < b)
    radius = max(abs(a), abs(b)) if ac.kind is CurveKind.TRUNCATED_COMPLETE else None
    return ArcCurve(
        params=grid,
        points=pts,
        kind=ac.kind,
        truncation_radius=radius,
        breaks=breaks,
    )


def reparametrize_arclength(c: ArcCurve, n_out: int) -> ArcCurve:
    """Resample a curve uniformly in arclength.

    Each smooth piece is interpolated with a cubic spline in the original
    parameter; arclength along the spline is accumulated with Gauss panels,
    giving output params that are cumulative length values.  Breakpoints
    survive as arclength positions (snapped onto the output grid by the
    piecewise operators later).
    """
    if n_out < 2:
        raise ValueError("n_out must be >= 2")
    nodes, weights = np.polynomial.legendre.leggauss(6)
    splines = []
    piece_lengths = []
    for lo, hi in piece_index_ranges(c):
        sl = slice(lo, hi + 1)
        sp = CubicSpline(c.params[sl], c.points[sl], axis=0)
        t0, t1 = c.params[lo], c.params[hi]
        # Refined grid for the length accumulation and inverse.
        m = max(4 * (hi - lo), 8)
        tt = np.linspace(t0, t1, m + 1)
        half = 0.5 * np.diff(tt)
        mid = 0.5 * (tt[1:] + tt[:-1])
        pts_eval = mid[:, None] + half[:, None] * nodes[None, :]
        dp = sp(pts_eval.ravel(), 1).reshape(m, nodes.size, -1)
        seg = half * (np.linalg.norm(dp, axis=2) @ weights)
        s_cum = np.concatenate(([0.0], np.cumsum(seg)))
        splines.append((sp, tt, s_cum))
        piece_lengths.append(float(s_cum[-1]))

    total = float(sum(piece_lengths))
    s_targets = np.linspace(0.0, total, n_out)
    new_pts = np.empty((n_out, c.dim))
    offsets = np.concatenate(([0.0], np.cumsum(piece_lengths)))
    new_breaks = tuple(float(o) for o in offsets[1:-1])
    piece_of = np.clip(np.searchsorted(offsets, s_targets, side="right") - 1, 0, len(splines) - 1)
    for pi, (sp, tt, s_cum) in enumerate(splines):
        mask = piece_of == pi
        if not np.any(mask):
            continue
        local = np.clip(s_targets[mask] - offsets[pi], 0.0, s_cum[-1])
        inv = PchipInterpolator(s_cum, tt)
        new_pts[mask] = sp(inv(local))
    # Exact endpoint carry-over avoids closure drift on loops.
    new_pts[0] = c.points[0]
    new_pts[-1] = c.points[-1]
    return ArcCurve(
        params=s_targets,
        points=new_pts,
        kind=c.kind,
        tail_direction=c.tail_direction,
        truncation_radius=c.truncation_radius,
        breaks=new_breaks,
    )


# ---------------------------------------------------------------------------
# file formats: CSV samples plus a JSON sidecar with the metadata


_COLUMN_NAMES = ("x", "y", "z")


def _sidecar_path(path: Path) -> Path:
    return path.with_suffix(".json")


def write_curve(
    path: str | Path,
    c: ArcCurve,
    family: str | None = None,
    family_params: dict | None = None,
) -> Path:
    """Write samples as CSV (17 significant digits) plus a JSON sidecar."""
    path = Path(path)
    names = [
        _COLUMN_NAMES[i] if i < len(_COLUMN_NAMES) else f"c{i}" for i in range(c.dim)
    ]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s"] + names)
        for s, p in zip(c.params, c.points):
            writer.writerow([f"{s:.17g}"] + [f"{x:.17g}" for x in p])
    meta = {
        "kind": c.kind.value,
        "dim": c.dim,
        "truncation_radius": c.truncation_radius,
        "family": family,
        "params": family_params or {},
        "breaks": list(c.breaks),
        "tail_direction": [float(x) for x in c.tail_direction],
    }
    with _sidecar_path(path).open("w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def read_curve(path: str | Path) -> ArcCurve:
    """Read a curve CSV; the JSON sidecar restores metadata when present."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}:1: empty file")
        if not header or header[0] != "s":
            raise ValueError(f"{path}:1: expected header starting with 's'")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(
                    f"{path}:{lineno}: expected {len(header)} columns, got {len(row)}"
                )
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric value in {row!r}") from None
    if not rows:
        raise ValueError(f"{path}:2: no samples")
    data = np.asarray(rows)
    params = data[:, 0]
    points = data[:, 1:]
    kind = CurveKind.OPEN_ARC
    radius = None
    breaks: tuple[float, ...] = ()
    tail = None
    side = _sidecar_path(path)
    if side.exists():
        meta = json.loads(side.read_text())
        kind = CurveKind(meta.get("kind", "open-arc"))
        radius = meta.get("truncation_radius")
        breaks = tuple(meta.get("breaks", ()))
        if meta.get("tail_direction") is not None:
            tail = np.asarray(meta["tail_direction"], dtype=float)
    return ArcCurve(
        params=params,
        points=points,
        kind=kind,
        tail_direction=tail,
        truncation_radius=radius,
        breaks=breaks,
    )


def read_curve_metadata(path: str | Path) -> dict:
    side = _sidecar_path(Path(path))
    if side.exists():
        return json.loads(side.read_text())
    return {}
