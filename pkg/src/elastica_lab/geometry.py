"""Self-intersection detection and positivity predicates.

The predicates quantified over here are the geometric hypotheses of the
energy-threshold statements: graphicality (tangent has positive component
along e1), embeddedness (no self-intersection events), and tangentiality
(contact with aligned or opposite tangents).

Detection runs in three stages: a uniform spatial hash proposes candidate
segment pairs, exact segment-segment tests catch transversal crossings,
and a closest-point Newton refinement on local cubic interpolants catches
tangential contacts, which never produce a clean crossing.  Tolerances are
lengths: ``spatial_tol`` defaults to 1e-6 times the curve diameter,
``angle_tol`` to 1e-3 on the tangent dot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import ArcCurve, piece_geometry

__all__ = [
    "IntersectionEvent",
    "self_intersections",
    "is_graphical",
    "is_embedded",
    "DEFAULT_ANGLE_TOL",
]

DEFAULT_ANGLE_TOL = 1e-3
_ARC_GUARD_FACTOR = 10.0  # arc separation below this times spatial_tol is noise


@dataclass(frozen=True)
class IntersectionEvent:
    """One detected self-contact.

    Attributes:
        s1, s2: parameter values of the two visits, s1 < s2.
        point: contact position (midpoint of the two refined points).
        tangent_dot: inner product of the unit tangents at the two visits.
        classification: "transversal", "tangential_same", or
            "tangential_opposite"; tangential iff |tangent_dot| is within
            angle_tol of 1.
        separation: the smaller of the two arc distances between the visits
            (along the curve, around the ring for closed curves).
        gap: closest distance between the two local arcs (0 for an exact
            segment crossing).
    """

    s1: float
    s2: float
    point: np.ndarray
    tangent_dot: float
    classification: str
    separation: float
    gap: float

    def as_dict(self) -> dict:
        return {
            "s1": self.s1,
            "s2": self.s2,
            "point": [float(x) for x in self.point],
            "tangent_dot": self.tangent_dot,
            "classification": self.classification,
            "separation": self.separation,
            "gap": self.gap,
        }


def _classify(tangent_dot: float, angle_tol: float) -> str:
    if tangent_dot >= 1.0 - angle_tol:
        return "tangential_same"
    if tangent_dot <= -1.0 + angle_tol:
        return "tangential_opposite"
    return "transversal"


def _segment_closest(p0, p1, q0, q1):
    """Closest parameters (u, v) in [0,1]^2 between two segments."""
    d1 = p1 - p0
    d2 = q1 - q0
    r = p0 - q0
    a = float(d1 @ d1)
    b = float(d1 @ d2)
    c = float(d2 @ d2)
    d = float(d1 @ r)
    e = float(d2 @ r)
    denom = a * c - b * b
    if denom > 1e-14 * a * c:
        u = (b * e - c * d) / denom
    else:
        u = 0.0
    u = min(max(u, 0.0), 1.0)
    v = (b * u + e) / c if c > 0.0 else 0.0
    v = min(max(v, 0.0), 1.0)
    u = (b * v - d) / a if a > 0.0 else 0.0
    u = min(max(u, 0.0), 1.0)
    gap = float(np.linalg.norm((p0 + u * d1) - (q0 + v * d2)))
    return u, v, gap


def _segment_crossing(p0, p1, q0, q1):
    """Exact 2D segment intersection; returns (u, v) or None."""
    d1 = p1 - p0
    d2 = q1 - q0
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    scale = max(float(np.linalg.norm(d1) * np.linalg.norm(d2)), 1e-300)
    if abs(denom) <= 1e-12 * scale:
        return None
    r = q0 - p0
    u = (r[0] * d2[1] - r[1] * d2[0]) / denom
    v = (r[0] * d1[1] - r[1] * d1[0]) / denom
    if 0.0 <= u <= 1.0 and 0.0 <= v <= 1.0:
        return u, v
    return None


def _local_cubic(params: np.ndarray, points: np.ndarray, i: int, closed: bool):
    """Cubic through the four nodes around segment i, per coordinate.

    Returns (t_mid, half_span, coeffs) with the polynomial written in the
    shifted variable (t - t_mid) for conditioning; coeffs has shape (4, dim).
    For closed curves the flanking nodes wrap around the ring, with their
    parameters placed in the frame of segment i.
    """
    n = points.shape[0]
    if closed:
        n_ring = n - 1
        t = np.empty(4)
        t[1] = params[i]
        t[2] = params[i + 1]
        pred = (i - 1) % n_ring
        succ = (i + 1) % n_ring
        t[0] = t[1] - (params[pred + 1] - params[pred])
        t[3] = t[2] + (params[succ + 1] - params[succ])
        pts = np.stack(
            (points[(i - 1) % n_ring], points[i], points[i + 1], points[(i + 2) % n_ring])
        )
    else:
        lo = min(max(i - 1, 0), n - 4)
        t = params[lo : lo + 4].astype(float)
        pts = points[lo : lo + 4]
    t_mid = 0.5 * (t[0] + t[-1])
    shifted = t - t_mid
    coeffs = np.polynomial.polynomial.polyfit(shifted, pts, 3)
    half_span = float(max(abs(shifted[0]), abs(shifted[-1])))
    return t_mid, half_span, coeffs


def _poly_eval(coeffs: np.ndarray, u: float) -> np.ndarray:
    return ((coeffs[3] * u + coeffs[2]) * u + coeffs[1]) * u + coeffs[0]


def _poly_deriv(coeffs: np.ndarray, u: float) -> np.ndarray:
    return (3.0 * coeffs[3] * u + 2.0 * coeffs[2]) * u + coeffs[1]


def _poly_second(coeffs: np.ndarray, u: float) -> np.ndarray:
    return 6.0 * coeffs[3] * u + 2.0 * coeffs[2]


def _refine_contact(cub_a, cub_b, u0: float, v0: float):
    """Newton minimization of the squared distance between two local cubics.

    Seeds at (u0, v0) in shifted coordinates; steps are clamped to each
    cubic's own interpolation span so it is never used where it extrapolates.
    """
    mid_a, span_a, ca = cub_a
    mid_b, span_b, cb = cub_b
    u, v = u0, v0
    window = max(span_a, span_b)
    for _ in range(30):
        pa = _poly_eval(ca, u)
        pb = _poly_eval(cb, v)
        da = _poly_deriv(ca, u)
        db = _poly_deriv(cb, v)
        diff = pa - pb
        g = np.array([diff @ da, -(diff @ db)])
        h11 = da @ da + diff @ _poly_second(ca, u)
        h22 = db @ db - diff @ _poly_second(cb, v)
        h12 = -(da @ db)
        det = h11 * h22 - h12 * h12
        if abs(det) < 1e-30:
            break
        du = -(h22 * g[0] - h12 * g[1]) / det
        dv = -(h11 * g[1] - h12 * g[0]) / det
        step = max(abs(du), abs(dv))
        cap = 0.5 * window
        if step > cap:
            du *= cap / step
            dv *= cap / step
        u += du
        v += dv
        u = min(max(u, -span_a), span_a)
        v = min(max(v, -span_b), span_b)
        if step < 1e-14 * max(window, 1.0):
            break
    pa = _poly_eval(ca, u)
    pb = _poly_eval(cb, v)
    gap = float(np.linalg.norm(pa - pb))
    ta = _poly_deriv(ca, u)
    tb = _poly_deriv(cb, v)
    na = float(np.linalg.norm(ta))
    nb = float(np.linalg.norm(tb))
    tdot = float(ta @ tb / (na * nb)) if na > 0 and nb > 0 else 0.0
    return mid_a + u, mid_b + v, 0.5 * (pa + pb), gap, tdot


def _hash_candidates(points: np.ndarray, ring: bool) -> set[tuple[int, int]]:
    """Non-adjacent segment pairs whose cells touch (uniform spatial hash)."""
    seg_lo = np.minimum(points[:-1], points[1:])
    seg_hi = np.maximum(points[:-1], points[1:])
    n_seg = seg_lo.shape[0]
    cell = float(np.max(seg_hi - seg_lo))
    cell = max(cell, 1e-12)
    buckets: dict[tuple[int, ...], list[int]] = {}
    lo_idx = np.floor(seg_lo / cell).astype(np.int64)
    hi_idx = np.floor(seg_hi / cell).astype(np.int64)
    for i in range(n_seg):
        for cx in range(lo_idx[i, 0], hi_idx[i, 0] + 1):
            for cy in range(lo_idx[i, 1], hi_idx[i, 1] + 1):
                buckets.setdefault((cx, cy), []).append(i)
    neighbor = [(0, 0), (1, 0), (0, 1), (1, 1), (1, -1)]
    pairs: set[tuple[int, int]] = set()
    for key, members in buckets.items():
        for dx, dy in neighbor:
            other = buckets.get((key[0] + dx, key[1] + dy))
            if other is None:
                continue
            if other is members:
                group = members
                for ai in range(len(group)):
                    for bi in range(ai + 1, len(group)):
                        pairs.add((group[ai], group[bi]))
            else:
                for i in members:
                    for j in other:
                        if i != j:
                            pairs.add((min(i, j), max(i, j)))
    def adjacent(i: int, j: int) -> bool:
        d = abs(i - j)
        if ring:
            d = min(d, n_seg - d)
        return d < 2
    return {(i, j) for (i, j) in pairs if not adjacent(i, j)}


def self_intersections(
    c: ArcCurve,
    spatial_tol: float | None = None,
    angle_tol: float = DEFAULT_ANGLE_TOL,
) -> list[IntersectionEvent]:
    """All self-contacts of a planar sampled curve.

    Transversal crossings come from exact segment intersection; tangential
    contacts from closest-point refinement of near-miss pairs (gap below
    spatial_tol).  Pairs closer along the curve than 10x spatial_tol (and
    never less than a few segments) are polyline noise and are skipped.
    Nearby raw hits are merged so one geometric contact yields one event.
    """
    if c.dim != 2:
        raise ValueError("self-intersection detection is planar only")
    if spatial_tol is None:
        spatial_tol = 1e-6 * c.diameter
    if spatial_tol <= 0.0:
        raise ValueError("spatial_tol must be positive")
    points = c.points
    params = c.params
    ring = c.is_closed
    n_seg = points.shape[0] - 1
    arc = np.concatenate(([0.0], np.cumsum(np.linalg.norm(np.diff(points, axis=0), axis=1))))
    total_arc = float(arc[-1])
    mean_h = total_arc / n_seg
    arc_guard = max(_ARC_GUARD_FACTOR * spatial_tol, 4.0 * mean_h)

    tangents = _sample_tangents(c)

    def arc_separation(sa: float, sb: float) -> float:
        d = abs(sb - sa)
        return min(d, total_arc - d) if ring else d

    raw = []
    for i, j in sorted(_hash_candidates(points, ring)):
        crossing = _segment_crossing(points[i], points[i + 1], points[j], points[j + 1])
        if crossing is not None:
            u, v = crossing
            si = arc[i] + u * (arc[i + 1] - arc[i])
            sj = arc[j] + v * (arc[j + 1] - arc[j])
            if arc_separation(si, sj) <= arc_guard:
                continue
            pt = points[i] + u * (points[i + 1] - points[i])
            ti = (1.0 - u) * tangents[i] + u * tangents[i + 1]
            tj = (1.0 - v) * tangents[j] + v * tangents[j + 1]
            tdot = float(ti @ tj / (np.linalg.norm(ti) * np.linalg.norm(tj)))
            p1 = params[i] + u * (params[i + 1] - params[i])
            p2 = params[j] + v * (params[j + 1] - params[j])
            raw.append((p1, p2, pt, tdot, 0.0, si, sj))
            continue
        u, v, gap = _segment_closest(points[i], points[i + 1], points[j], points[j + 1])
        if gap > 50.0 * spatial_tol:
            continue
        si = arc[i] + u * (arc[i + 1] - arc[i])
        sj = arc[j] + v * (arc[j + 1] - arc[j])
        if arc_separation(si, sj) <= arc_guard:
            continue
        cub_a = _local_cubic(params, points, i, ring)
        cub_b = _local_cubic(params, points, j, ring)
        seed_u = params[i] + u * (params[i + 1] - params[i]) - cub_a[0]
        seed_v = params[j] + v * (params[j + 1] - params[j]) - cub_b[0]
        p1, p2, pt, gap, tdot = _refine_contact(cub_a, cub_b, seed_u, seed_v)
        if gap > spatial_tol:
            continue
        raw.append((p1, p2, pt, tdot, gap, si, sj))

    return _merge_events(raw, c, arc_guard, angle_tol, total_arc, ring)


def _sample_tangents(c: ArcCurve) -> np.ndarray:
    out = np.empty_like(c.points)
    for lo, hi, tangents, _, _ in piece_geometry(c):
        out[lo : hi + 1] = tangents
    return out


def _merge_events(raw, c, merge_radius, angle_tol, total_arc, ring):
    def close(a: float, b: float) -> bool:
        d = abs(a - b)
        if ring:
            d = min(d, total_arc - d)
        return d <= merge_radius

    events: list[IntersectionEvent] = []
    raw = sorted(raw, key=lambda r: r[4])  # smallest gap first; crossings lead
    taken: list[tuple[float, float]] = []
    for p1, p2, pt, tdot, gap, si, sj in raw:
        lo, hi = (p1, p2) if p1 <= p2 else (p2, p1)
        s_lo, s_hi = (si, sj) if p1 <= p2 else (sj, si)
        if any(close(s_lo, a) and close(s_hi, b) for a, b in taken):
            continue
        taken.append((s_lo, s_hi))
        sep = abs(s_hi - s_lo)
        if ring:
            sep = min(sep, total_arc - sep)
        events.append(
            IntersectionEvent(
                s1=float(lo),
                s2=float(hi),
                point=np.asarray(pt, dtype=float),
                tangent_dot=float(np.clip(tdot, -1.0, 1.0)),
                classification=_classify(float(tdot), angle_tol),
                separation=float(sep),
                gap=float(gap),
            )
        )
    events.sort(key=lambda ev: (ev.s1, ev.s2))
    return events


def is_graphical(c: ArcCurve, atol: float = 1e-8) -> tuple[bool, float]:
    """Whether <T, e1> stays positive, and its minimum over the samples.

    Both one-sided limits are inspected at break nodes.  Values within atol
    of zero count as not graphical: the serpent's tangent at its midpoint
    is exactly vertical, and the discrete minimum there is pure noise.
    """
    best = math.inf
    for _, _, tangents, _, _ in piece_geometry(c):
        best = min(best, float(tangents[:, 0].min()))
    return best > atol, best


def is_embedded(
    c: ArcCurve,
    spatial_tol: float | None = None,
    angle_tol: float = DEFAULT_ANGLE_TOL,
) -> bool:
    """True iff no self-intersection event is detected."""
    return not self_intersections(c, spatial_tol=spatial_tol, angle_tol=angle_tol)
