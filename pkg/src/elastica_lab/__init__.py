"""Planar elastic curves at desk scale.

Sampled and closed-form curve models, the bending-plus-direction energy and
its lower bounds, a semi-implicit solver for the penalized elastic flow,
self-intersection classification, and the threshold experiments built on
all of the above.
"""

try:
    from importlib.metadata import version as _dist_version

    __version__ = _dist_version("elastica-lab")
except Exception:  # pragma: no cover - not installed
    __version__ = "0.1.0"

from .curves import (
    AnalyticCurve,
    ArcCurve,
    CurveKind,
    read_curve,
    reparametrize_arclength,
    sample_analytic,
    write_curve,
)
from .energy import (
    EnergyReport,
    analytic_energies,
    energies,
    rotation_lower_bound,
    turning_lower_bound,
)
from .flow import FlowConfig, FlowState, run
from .geometry import IntersectionEvent, is_embedded, is_graphical, self_intersections
from .shapes import FAMILY_BUILDERS, sample_family

__all__ = [
    "__version__",
    "AnalyticCurve",
    "ArcCurve",
    "CurveKind",
    "EnergyReport",
    "FAMILY_BUILDERS",
    "FlowConfig",
    "FlowState",
    "IntersectionEvent",
    "analytic_energies",
    "energies",
    "is_embedded",
    "is_graphical",
    "read_curve",
    "reparametrize_arclength",
    "rotation_lower_bound",
    "run",
    "sample_analytic",
    "sample_family",
    "self_intersections",
    "turning_lower_bound",
    "write_curve",
]
