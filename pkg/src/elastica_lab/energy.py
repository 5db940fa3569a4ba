"""Length, bending, and line-anchored energies of curves, plus lower bounds.

The central functional is ``energy = bending + direction`` where bending is
half the integrated squared curvature and direction is half the integrated
squared deviation of the unit tangent from e1.  For closed curves the
direction term coincides with the length, so ``energy`` equals
``elastic_energy = bending + length`` there.

Quadrature is composite Simpson on the sample grid, applied piece by piece
between breakpoints with the parameter speed as Jacobian.  For curves with
truncated horizontal tails the report carries a separate bound on the
omitted tail energy, so downstream comparisons can form two-sided
enclosures instead of silently absorbing the truncation bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson, trapezoid

from .curves import (
    AnalyticCurve,
    ArcCurve,
    CurveKind,
    e1_vector,
    ends_horizontal,
    piece_geometry,
    rounded_rotation_number,
)

__all__ = [
    "EnergyReport",
    "NotClosedError",
    "energies",
    "analytic_energies",
    "c0_closed_identity_check",
    "turning_lower_bound",
    "rotation_lower_bound",
    "tail_energy_bound",
]


class NotClosedError(ValueError):
    """A closed-curve identity was requested for a non-closed curve."""


@dataclass(frozen=True)
class EnergyReport:
    """Energy components of one curve.

    Attributes:
        length: total length.
        direction: half the integral of |T - e1|^2 in arclength.
        bending: half the integral of |curvature|^2 in arclength.
        quad_error: rough quadrature error estimate (Simpson vs trapezoid
            Richardson difference, summed over the components).
        tail_bound: bound on the energy omitted by tail truncation; zero
            for curves that are not truncated-complete.

    The two headline quantities are derived, so their defining identities
    hold exactly: ``energy = bending + direction`` and ``elastic_energy =
    bending + length``.
    """

    length: float
    direction: float
    bending: float
    quad_error: float = 0.0
    tail_bound: float = 0.0

    def __post_init__(self) -> None:
        for name in ("length", "direction", "bending", "quad_error", "tail_bound"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative")

    @property
    def energy(self) -> float:
        return self.bending + self.direction

    @property
    def elastic_energy(self) -> float:
        return self.bending + self.length


def tail_energy_bound(end_tangent: np.ndarray, dim: int) -> float:
    """Energy beyond a truncation point, from the end tangent alone.

    Equals the exact remaining energy of a borderline tail whose tangent
    defect matches the sample: with d = |T - e1| the closed form is
    4 - 2*sqrt(4 - d^2), which is d^2/2 + O(d^4).  Tails straighter than
    the borderline's have less energy, so adding this to a computed energy
    keeps lower-bound checks conservative.
    """
    d = float(np.linalg.norm(np.asarray(end_tangent) - e1_vector(dim)))
    d = min(d, 2.0)
    return 4.0 - 2.0 * math.sqrt(max(4.0 - d * d, 0.0))


def _simpson_with_estimate(y: np.ndarray, x: np.ndarray) -> tuple[float, float]:
    s = float(simpson(y, x=x))
    t = float(trapezoid(y, x=x))
    return s, abs(s - t) / 15.0


def energies(c: ArcCurve) -> EnergyReport:
    """Integrate the energy densities of a sampled curve.

    Piecewise composite Simpson between breakpoints; the discrete tangent
    and curvature at a break node are evaluated one-sided from within each
    piece.  Closed curves without breakpoints integrate with periodic
    stencils over the full ring.
    """
    e1 = e1_vector(c.dim)
    pieces = piece_geometry(c)
    length = direction = bending = err = 0.0
    for lo, hi, tangents, speed, kappa in pieces:
        x = c.params[lo : hi + 1]
        dev = tangents - e1
        val_l, e_l = _simpson_with_estimate(speed, x)
        val_d, e_d = _simpson_with_estimate(
            0.5 * np.einsum("ij,ij->i", dev, dev) * speed, x
        )
        val_b, e_b = _simpson_with_estimate(
            0.5 * np.einsum("ij,ij->i", kappa, kappa) * speed, x
        )
        length += val_l
        direction += val_d
        bending += val_b
        err += e_l + e_d + e_b
    tail = 0.0
    if c.kind is CurveKind.TRUNCATED_COMPLETE:
        t_first = pieces[0][2][0]
        t_last = pieces[-1][2][-1]
        tail = tail_energy_bound(t_first, c.dim) + tail_energy_bound(t_last, c.dim)
    return EnergyReport(
        length=length,
        direction=max(direction, 0.0),
        bending=max(bending, 0.0),
        quad_error=err,
        tail_bound=tail,
    )


def analytic_energies(ac: AnalyticCurve, a: float, b: float, n: int = 16001) -> EnergyReport:
    """Energies of a closed-form curve over [a, b] by dense Simpson.

    The integrand values come from the curve's own evaluators (no finite
    differences), so the only error is the O(h^4) composite-Simpson one;
    breakpoints split the quadrature so each panel sees a smooth integrand.
    n is the node count per smooth piece (forced odd).
    """
    if not a < b:
        raise ValueError("need a < b")
    if n < 5:
        raise ValueError("need n >= 5")
    if n % 2 == 0:
        n += 1
    cuts = [a] + [x for x in ac.breaks if a < x < b] + [b]
    length = direction = bending = err = 0.0
    for lo_cut, hi_cut in zip(cuts[:-1], cuts[1:]):
        x = np.linspace(lo_cut, hi_cut, n)
        tangents = np.asarray(ac.tangent(x), dtype=float)
        k = np.asarray(ac.curvature(x), dtype=float)
        speed = np.asarray(ac.speed_at(x), dtype=float)
        dev = tangents - e1_vector(tangents.shape[-1])
        val, e = _simpson_with_estimate(speed, x)
        length += val
        err += e
        val, e = _simpson_with_estimate(0.5 * np.einsum("ij,ij->i", dev, dev) * speed, x)
        direction += val
        err += e
        val, e = _simpson_with_estimate(0.5 * k * k * speed, x)
        bending += val
        err += e
    tail = 0.0
    if ac.kind is CurveKind.TRUNCATED_COMPLETE:
        t_ab = np.asarray(ac.tangent(np.array([a, b])), dtype=float)
        dim = t_ab.shape[-1]
        tail = tail_energy_bound(t_ab[0], dim) + tail_energy_bound(t_ab[1], dim)
    return EnergyReport(
        length=length,
        direction=max(direction, 0.0),
        bending=max(bending, 0.0),
        quad_error=err,
        tail_bound=tail,
    )


def c0_closed_identity_check(c: ArcCurve) -> float:
    """|direction - length| for a closed curve; equals |energy - elastic_energy|.

    For any closed curve the tangent integrates to zero, so the direction
    term equals the length; the returned defect is pure quadrature error
    and should sit at the grid's accuracy floor.
    """
    if not c.is_closed:
        raise NotClosedError("identity requires a c0-closed curve")
    rep = energies(c)
    return abs(rep.direction - rep.length)


def turning_lower_bound(delta: float) -> float:
    """Sharp energy lower bound as a function of the unsigned net turning.

    8 per full turn, plus 16 sin^2(r/8) for the remaining angle r; the
    increment is the energy of a borderline arc absorbing that much turning.
    The argument is |net turning|, not the tangent angle's total variation:
    a sawtooth of cancelling swings has large variation at tiny energy.
    """
    if delta < 0.0:
        raise ValueError("total turning must be >= 0")
    full, frac = divmod(delta, 2.0 * math.pi)
    return 8.0 * full + 16.0 * math.sin(frac / 8.0) ** 2


def rotation_lower_bound(c: ArcCurve, tol: float = 1e-6) -> tuple[float, bool]:
    """Bound 8*|rounded rotation number| and whether the curve satisfies it.

    The check adds the tail bound to the computed energy (the bound applies
    to the complete curve) plus tol of slack for quadrature noise.
    """
    if c.dim != 2:
        raise ValueError("rotation bound is planar only")
    if c.kind is CurveKind.TRUNCATED_COMPLETE:
        flat, defects = ends_horizontal(c, tol=1e-3)
        if not flat:
            raise ValueError(
                f"ends not horizontal (defects {defects[0]:.2e}, {defects[1]:.2e})"
            )
    elif not c.is_closed:
        raise ValueError("rotation bound needs a closed or truncated-complete curve")
    n, _ = rounded_rotation_number(c)
    bound = 8.0 * abs(n)
    rep = energies(c)
    satisfied = rep.energy + rep.tail_bound + tol >= bound
    return bound, satisfied
