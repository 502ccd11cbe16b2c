"""Closed-form bounds on cosine distances between a unit vector and a ball.

Normalizing every point of a ball that excludes the origin projects it
onto a spherical cap whose angular radius is arcsin(r / ||center||).
Cosine distance to a fixed unit target therefore ranges over an interval
determined by that cap half-angle and the angle between target and
center. When the ball contains the origin the normalized images cover
every direction and the interval degenerates to [0, 2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InputError


class ArcHalfAngle(NamedTuple):
    """Cap half-angle; ``full_sphere`` marks an origin-enclosing ball.

    For the full-sphere case ``theta`` is set to pi so the interval
    arithmetic below degrades gracefully to [0, 2].
    """

    theta: float
    full_sphere: bool


def arc_half_angle(center, radius: float) -> ArcHalfAngle:
    """Half-angle of the direction cap spanned by a ball's points."""
    c = np.asarray(center, dtype=np.float64)
    if radius < 0:
        raise InputError("radius must be nonnegative")
    norm = float(np.linalg.norm(c))
    if norm == 0.0:
        raise InputError("arc undefined at origin")
    if radius >= norm:
        return ArcHalfAngle(math.pi, True)
    return ArcHalfAngle(math.asin(radius / norm), False)


@dataclass(frozen=True)
class CosineRangeQuery:
    """A ball (center, radius) probed against a unit-norm target vector."""

    center: np.ndarray
    radius: float
    target: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.center, dtype=np.float64)
        t = np.asarray(self.target, dtype=np.float64)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "target", t)
        if self.radius < 0:
            raise InputError("radius must be nonnegative")
        if c.shape != t.shape:
            raise InputError("center and target must share a dimension")
        if abs(float(np.linalg.norm(t)) - 1.0) > 1e-9:
            raise InputError("target must be unit norm")

    @property
    def half_angle(self) -> ArcHalfAngle:
        return arc_half_angle(self.center, self.radius)

    @property
    def offset_angle(self) -> float:
        """Angle between target and center direction."""
        c = self.center
        norm = float(np.linalg.norm(c))
        if norm == 0.0:
            raise InputError("arc undefined at origin")
        cos_a = float(self.target @ c) / norm
        return math.acos(min(1.0, max(-1.0, cos_a)))


def cosine_distance_range(query: CosineRangeQuery) -> tuple[float, float]:
    """Interval [lo, hi] of cosine distances from the target to ball points."""
    theta, full = query.half_angle
    if full:
        return (0.0, 2.0)
    alpha = query.offset_angle
    lo = 1.0 - math.cos(max(0.0, alpha - theta))
    hi = 1.0 - math.cos(min(math.pi, alpha + theta))
    return (lo, hi)


def range_width_monotone(center, target, radii) -> bool:
    """Whether interval width is nondecreasing along an ascending radius list.

    Center and target are held fixed; radii must stay below ||center||
    (proper caps) and be strictly increasing.
    """
    c = np.asarray(center, dtype=np.float64)
    rs = [float(r) for r in radii]
    if any(b <= a for a, b in zip(rs, rs[1:])):
        raise InputError("radii must be strictly increasing")
    norm = float(np.linalg.norm(c))
    if any(r >= norm for r in rs):
        raise InputError("all radii must be smaller than ||center||")
    widths = []
    for r in rs:
        lo, hi = cosine_distance_range(CosineRangeQuery(c, r, target))
        widths.append(hi - lo)
    return all(b >= a - 1e-12 for a, b in zip(widths, widths[1:]))
