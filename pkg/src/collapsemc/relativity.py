"""Special-relativistic kinematics for the two-detector geometry.

Everything is 1+1 dimensional (the experiment is collinear along x) and
in SI units with c the exact defined constant.  A boost by velocity v
maps (t, x) to (gamma (t - v x / c^2), gamma (x - v t)) with the standard
Lorentz factor gamma = 1 / sqrt(1 - v^2 / c^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

C = 2.99792458e8  # speed of light, m/s (exact)

# Boosted times closer than this are reported as simultaneous; guards
# floating rounding at v = 0 only.
SIMULTANEITY_TOL_S = 1e-18


class SuperluminalFrameError(ValueError):
    """Boost velocity magnitude is >= c."""


class InvalidGeometryError(ValueError):
    """Detector separation or collapse time is not positive."""


@dataclass(frozen=True)
class Event:
    """Spacetime point: coordinate time t (s) and position x (m)."""

    t: float
    x: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and math.isfinite(self.x)):
            raise ValueError(f"event components must be finite, got ({self.t}, {self.x})")

    def interval2(self) -> float:
        """Invariant c^2 t^2 - x^2 (m^2)."""
        return (C * self.t) ** 2 - self.x ** 2


@dataclass(frozen=True)
class Frame:
    """Inertial frame boosted by v along x.

    Labels follow the experiment's convention: frame0 is the mirror rest
    frame (v = 0), A moves in +x (v > 0), B in -x (v < 0).
    """

    v: float
    label: str = "custom"

    def __post_init__(self):
        if abs(self.v) >= C:
            raise SuperluminalFrameError(f"|v| must be < c, got {self.v}")
        if self.label not in ("frame0", "A", "B", "custom"):
            raise ValueError(f"unknown frame label {self.label!r}")
        if self.label == "frame0" and self.v != 0.0:
            raise ValueError("frame0 requires v = 0")
        if self.label == "A" and not self.v > 0.0:
            raise ValueError("frame A requires v > 0")
        if self.label == "B" and not self.v < 0.0:
            raise ValueError("frame B requires v < 0")


def gamma(v: float) -> float:
    """Lorentz factor 1 / sqrt(1 - v^2 / c^2)."""
    beta = v / C
    if abs(beta) >= 1.0:
        raise SuperluminalFrameError(f"|v| must be < c, got {v}")
    return 1.0 / math.sqrt(1.0 - beta * beta)


def boost(e: Event, v: float) -> Event:
    """Coordinates of an event in the frame moving at v along +x."""
    g = gamma(v)
    return Event(g * (e.t - v * e.x / (C * C)), g * (e.x - v * e.t))


def detection_events(d: float) -> tuple[Event, Event]:
    """Mirror-frame detection events for detectors at +d and -d.

    Both fire at t0 = d / c, so they are simultaneous in the mirror
    frame and light-like separated from the emission at the origin.
    """
    if not d > 0:
        raise InvalidGeometryError(f"d must be > 0, got {d}")
    t0 = d / C
    return Event(t0, d), Event(t0, -d)


def activation_gap(d: float, v: float) -> float:
    """Time between the two detections in a frame boosted by v:
    delta_t = 2 gamma v d / c^2."""
    if not d > 0:
        raise InvalidGeometryError(f"d must be > 0, got {d}")
    if not 0 < v < C:
        raise SuperluminalFrameError(f"v must satisfy 0 < v < c, got {v}")
    return 2.0 * gamma(v) * v * d / (C * C)


def min_separation(tau: float, v: float) -> float:
    """Detector distance for which the activation gap equals tau.

    Inverts activation_gap: d = tau c^2 / (2 gamma v).
    """
    if not tau > 0:
        raise InvalidGeometryError(f"tau must be > 0, got {tau}")
    if not 0 < v < C:
        raise SuperluminalFrameError(f"v must satisfy 0 < v < c, got {v}")
    return tau * C * C / (2.0 * gamma(v) * v)


def first_detector(frame: Frame, d: float) -> str:
    """Which detection comes first in the given frame: 'D1', 'D2' or
    'simultaneous'."""
    e1, e2 = detection_events(d)
    t1 = boost(e1, frame.v).t
    t2 = boost(e2, frame.v).t
    if abs(t1 - t2) <= SIMULTANEITY_TOL_S:
        return "simultaneous"
    return "D1" if t1 < t2 else "D2"
