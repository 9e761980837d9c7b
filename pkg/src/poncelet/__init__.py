"""Poncelet maps between nested convex ovals.

Rotation numbers, periodic orbits, rational plateaus of the rotation
function and invariant-density tests for conjugacy to a rotation.
"""

__version__ = "0.1.0"

from .core import (
    ConicClosedForm,
    PonceletPair,
    conic_closed_form_step,
    iterate,
    jacobian,
    lift_power,
    planar_step,
    poncelet_inverse,
    poncelet_step,
)
from .errors import PonceletError
from .kernels import BACKEND
from .ovals import Conic, Point2, Superellipse, circle, tangency_points
from .rotation import RotationEstimate, rotation_number

__all__ = [
    "BACKEND",
    "Conic",
    "ConicClosedForm",
    "Point2",
    "PonceletError",
    "PonceletPair",
    "RotationEstimate",
    "Superellipse",
    "circle",
    "conic_closed_form_step",
    "iterate",
    "jacobian",
    "lift_power",
    "planar_step",
    "poncelet_inverse",
    "poncelet_step",
    "rotation_number",
    "tangency_points",
]
