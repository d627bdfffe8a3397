"""Per-object criticality scoring.

Each object gets three component scores in [0, 1] (distance, colliding
trajectory, time-to-collision), each with a hard cutoff beyond its
parameter (d >= d_max gives 0, and so on), plus their weighted
combination. The decay shape below the cutoff is pluggable; the default
is linear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .scene import EgoState, OrientedBox, relative_state


def _decay_linear(value: float, cutoff: float) -> float:
    return max(0.0, 1.0 - value / cutoff)


def _decay_quadratic(value: float, cutoff: float) -> float:
    if value >= cutoff:
        return 0.0
    return 1.0 - (value / cutoff) ** 2


DECAY_SHAPES = {
    "linear": _decay_linear,
    "quadratic": _decay_quadratic,
}


@dataclass(frozen=True)
class OcmParams:
    """Criticality model parameters.

    d_max / r_max / t_max are the zero-criticality cutoffs for distance,
    closest approach, and time to collision. Weights must sum to 1.
    horizon bounds the closest-point-of-approach search.
    """

    d_max: float = 30.0
    r_max: float = 5.0
    t_max: float = 4.0
    weights: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    horizon: float = 4.0
    decay: str = "linear"

    def __post_init__(self):
        for name in ("d_max", "r_max", "t_max", "horizon"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        w = self.weights
        if len(w) != 3 or any(x < 0 for x in w):
            raise ValueError("weights must be three nonnegative numbers")
        if abs(sum(w) - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {sum(w)}")
        if self.decay not in DECAY_SHAPES:
            raise ValueError(f"unknown decay shape {self.decay!r}")
        object.__setattr__(self, "weights", (float(w[0]), float(w[1]), float(w[2])))

    @property
    def decay_fn(self):
        return DECAY_SHAPES[self.decay]


@dataclass(frozen=True)
class CriticalityScore:
    kappa_d: float
    kappa_r: float
    kappa_t: float
    kappa: float


def closest_point_of_approach(
    rel_pos: tuple[float, float],
    rel_vel: tuple[float, float],
    horizon: float,
) -> tuple[float, float]:
    """Time and distance of closest approach under constant relative velocity.

    The time is clamped to [0, horizon]; a zero relative velocity gives
    (0, |rel_pos|).
    """
    px, py = rel_pos
    vx, vy = rel_vel
    v2 = vx * vx + vy * vy
    if v2 == 0.0:
        return 0.0, math.hypot(px, py)
    t = -(px * vx + py * vy) / v2
    t = min(max(t, 0.0), horizon)
    return t, math.hypot(px + vx * t, py + vy * t)


def _collision_radius(ego: EgoState, box: OrientedBox) -> float:
    # Disc approximation: half diagonal of each footprint.
    ego_l, ego_w = ego.footprint
    return 0.5 * math.hypot(ego_l, ego_w) + 0.5 * math.hypot(box.length, box.width)


def time_to_collision(ego: EgoState, box: OrientedBox) -> float | None:
    """Earliest t >= 0 at which the bounding discs touch, or None.

    Constant relative velocity; no horizon cap (the criticality cutoff
    handles large values).
    """
    (px, py), (vx, vy) = relative_state(ego, box)
    r = _collision_radius(ego, box)
    if math.hypot(px, py) <= r:
        return 0.0
    v2 = vx * vx + vy * vy
    if v2 == 0.0:
        return None
    # |p + v t|^2 = r^2  ->  v2 t^2 + 2 (p.v) t + (|p|^2 - r^2) = 0
    pv = px * vx + py * vy
    c = px * px + py * py - r * r
    disc = pv * pv - v2 * c
    if disc < 0.0:
        return None
    t = (-pv - math.sqrt(disc)) / v2
    return t if t >= 0.0 else None


def kappa_distance(ego: EgoState, box: OrientedBox, params: OcmParams) -> float:
    d = math.hypot(box.center.x - ego.pose.x, box.center.y - ego.pose.y)
    return params.decay_fn(d, params.d_max)


def kappa_route(ego: EgoState, box: OrientedBox, params: OcmParams) -> float:
    rel_pos, rel_vel = relative_state(ego, box)
    _, d_cpa = closest_point_of_approach(rel_pos, rel_vel, params.horizon)
    return params.decay_fn(d_cpa, params.r_max)


def kappa_ttc(ego: EgoState, box: OrientedBox, params: OcmParams) -> float:
    ttc = time_to_collision(ego, box)
    if ttc is None:
        return 0.0
    return params.decay_fn(ttc, params.t_max)


def criticality(ego: EgoState, box: OrientedBox, params: OcmParams) -> CriticalityScore:
    """All three components plus their weighted combination."""
    k_d = kappa_distance(ego, box, params)
    k_r = kappa_route(ego, box, params)
    k_t = kappa_ttc(ego, box, params)
    w_d, w_r, w_t = params.weights
    return CriticalityScore(k_d, k_r, k_t, w_d * k_d + w_r * k_r + w_t * k_t)
