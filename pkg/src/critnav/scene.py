"""Birdview scene primitives: poses, oriented boxes, detections, frames.

Everything is a frozen value type so frames can be shared freely between
workers. Geometry is strictly 2D (top-down): boxes are rotated rectangles
with a velocity vector, the ego is a rectangle with a pose and velocity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

CLASS_LABELS = ("car", "truck", "bus", "pedestrian", "cyclist", "other")


def normalize_yaw(yaw: float) -> float:
    """Wrap an angle into (-pi, pi]. Idempotent."""
    y = math.remainder(yaw, math.tau)
    if y <= -math.pi:
        y += math.tau
    return y


def _require_finite(name: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class Pose2D:
    """Position plus heading in the global birdview frame."""

    x: float
    y: float
    yaw: float = 0.0

    def __post_init__(self):
        _require_finite("Pose2D", self.x, self.y, self.yaw)
        object.__setattr__(self, "yaw", normalize_yaw(self.yaw))


@dataclass(frozen=True)
class OrientedBox:
    """Rotated-rectangle footprint with a constant-velocity motion state."""

    center: Pose2D
    length: float
    width: float
    velocity: tuple[float, float] = (0.0, 0.0)
    class_label: str = "car"

    def __post_init__(self):
        if self.length <= 0 or self.width <= 0:
            raise ValueError(f"box dimensions must be positive, got {self.length}x{self.width}")
        _require_finite("OrientedBox", self.length, self.width, *self.velocity)
        if self.class_label not in CLASS_LABELS:
            raise ValueError(f"unknown class label {self.class_label!r}")
        object.__setattr__(self, "velocity", (float(self.velocity[0]), float(self.velocity[1])))

    def at_time(self, dt: float) -> "OrientedBox":
        """Box advanced by dt seconds at constant velocity."""
        c = self.center
        vx, vy = self.velocity
        return OrientedBox(
            center=Pose2D(c.x + vx * dt, c.y + vy * dt, c.yaw),
            length=self.length,
            width=self.width,
            velocity=self.velocity,
            class_label=self.class_label,
        )


@dataclass(frozen=True)
class Detection:
    """A predicted box with the detector's confidence in it."""

    box: OrientedBox
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence}")


@dataclass(frozen=True)
class EgoState:
    """The observer: pose, velocity and rectangular footprint."""

    pose: Pose2D
    velocity: tuple[float, float] = (0.0, 0.0)
    footprint: tuple[float, float] = (4.5, 2.0)  # length, width in meters

    def __post_init__(self):
        if self.footprint[0] <= 0 or self.footprint[1] <= 0:
            raise ValueError("ego footprint dimensions must be positive")
        _require_finite("EgoState", *self.velocity, *self.footprint)
        object.__setattr__(self, "velocity", (float(self.velocity[0]), float(self.velocity[1])))
        object.__setattr__(self, "footprint", (float(self.footprint[0]), float(self.footprint[1])))

    def footprint_box(self) -> OrientedBox:
        return OrientedBox(
            center=self.pose,
            length=self.footprint[0],
            width=self.footprint[1],
            velocity=self.velocity,
            class_label="other",
        )


@dataclass(frozen=True)
class Frame:
    timestamp: float
    ego: EgoState
    ground_truth: tuple[OrientedBox, ...] = ()
    detections: tuple[Detection, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ground_truth", tuple(self.ground_truth))
        object.__setattr__(self, "detections", tuple(self.detections))


@dataclass(frozen=True)
class Scenario:
    id: str
    frames: tuple[Frame, ...]
    frame_period: float = 0.5
    ego_footprint: tuple[float, float] = (4.5, 2.0)

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        if not self.frames:
            raise ValueError("a scenario needs at least one frame")
        if self.frame_period <= 0:
            raise ValueError("frame_period must be positive")
        ts = [f.timestamp for f in self.frames]
        for a, b in zip(ts, ts[1:]):
            if not b > a:
                raise ValueError(f"timestamps must be strictly increasing, got {a} then {b}")


def relative_state(ego: EgoState, box: OrientedBox) -> tuple[tuple[float, float], tuple[float, float]]:
    """Box center and velocity relative to the ego, in the global frame."""
    rel_pos = (box.center.x - ego.pose.x, box.center.y - ego.pose.y)
    rel_vel = (box.velocity[0] - ego.velocity[0], box.velocity[1] - ego.velocity[1])
    return rel_pos, rel_vel


def box_corners(box: OrientedBox) -> list[tuple[float, float]]:
    """Corners of the rotated rectangle, counterclockwise.

    Order starts at (+length/2, +width/2) in the box frame.
    """
    hl, hw = 0.5 * box.length, 0.5 * box.width
    c, s = math.cos(box.center.yaw), math.sin(box.center.yaw)
    cx, cy = box.center.x, box.center.y
    local = ((hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw))
    return [(cx + dx * c - dy * s, cy + dx * s + dy * c) for dx, dy in local]


def _interval(corners, ax: float, ay: float) -> tuple[float, float]:
    dots = [cx * ax + cy * ay for cx, cy in corners]
    return min(dots), max(dots)


def boxes_overlap(a: OrientedBox, b: OrientedBox) -> bool:
    """Separating-axis intersection test on both boxes' edge normals.

    Touching edges count as overlap (conservative for safety checks).
    """
    # Cheap reject: bounding discs.
    dx = b.center.x - a.center.x
    dy = b.center.y - a.center.y
    ra = 0.5 * math.hypot(a.length, a.width)
    rb = 0.5 * math.hypot(b.length, b.width)
    if math.hypot(dx, dy) > ra + rb:
        return False

    ca = box_corners(a)
    cb = box_corners(b)
    # Each box contributes two distinct edge directions; its axes are the
    # box-frame unit vectors.
    axes = []
    for box in (a, b):
        cos_y, sin_y = math.cos(box.center.yaw), math.sin(box.center.yaw)
        axes.append((cos_y, sin_y))
        axes.append((-sin_y, cos_y))
    for ax, ay in axes:
        lo_a, hi_a = _interval(ca, ax, ay)
        lo_b, hi_b = _interval(cb, ax, ay)
        if hi_a < lo_b or hi_b < lo_a:
            return False
    return True
