"""Safety check on planned trajectories.

A planned trajectory is hazardous when the ego footprint placed on one of
its poses overlaps a ground-truth box at the matching future time. Future
box positions come from the recorded frames where the scenario still has
them (interpolating linearly between the bracketing frames), otherwise
from constant-velocity extrapolation.

hazard_rate counts only perception-induced hazards: frames where the
trajectory planned from the filtered detections collides while the
trajectory planned from ground truth does not. Hazards the planner
produces even under perfect perception are charged to the planner, not to
the detector or the filter policy; the per-frame reports stay available
for inspection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .criticality import OcmParams
from .filtering import FilterPolicy, apply_policy
from .planner import PlannerConfig, most_probable_trajectory, plan
from .scene import OrientedBox, Pose2D, Scenario, boxes_overlap


@dataclass(frozen=True)
class HazardEvent:
    step_index: int  # 1-based plan step
    time_offset: float  # seconds past the frame timestamp
    gt_box_index: int
    ego_pose: Pose2D

    def to_dict(self) -> dict:
        return {
            "step_index": self.step_index,
            "time_offset": self.time_offset,
            "gt_box_index": self.gt_box_index,
            "ego_pose": {
                "x": self.ego_pose.x,
                "y": self.ego_pose.y,
                "yaw": self.ego_pose.yaw,
            },
        }


@dataclass(frozen=True)
class HazardReport:
    hazards: tuple[HazardEvent, ...]

    @property
    def is_hazardous(self) -> bool:
        return bool(self.hazards)

    def to_dict(self) -> dict:
        return {
            "is_hazardous": self.is_hazardous,
            "hazards": [h.to_dict() for h in self.hazards],
        }


def _future_boxes(scenario: Scenario, frame_idx: int, t_abs: float) -> list[OrientedBox]:
    """Ground-truth boxes at absolute time t_abs (>= current frame time).

    Between two recorded frames with equally many boxes the boxes are
    index-paired and linearly interpolated (the generator emits actors in
    a stable order); on a count mismatch the nearer frame wins as-is.
    Past the last frame every box extrapolates at constant velocity.
    """
    frames = scenario.frames
    last = frames[-1]
    if t_abs >= last.timestamp:
        dt = t_abs - last.timestamp
        return [b.at_time(dt) for b in last.ground_truth]

    lo = frame_idx
    while lo + 1 < len(frames) and frames[lo + 1].timestamp <= t_abs:
        lo += 1
    f0, f1 = frames[lo], frames[lo + 1]
    alpha = (t_abs - f0.timestamp) / (f1.timestamp - f0.timestamp)

    if len(f0.ground_truth) != len(f1.ground_truth):
        nearest = f0 if alpha < 0.5 else f1
        return [b.at_time(t_abs - nearest.timestamp) for b in nearest.ground_truth]

    out = []
    for b0, b1 in zip(f0.ground_truth, f1.ground_truth):
        x = b0.center.x + alpha * (b1.center.x - b0.center.x)
        y = b0.center.y + alpha * (b1.center.y - b0.center.y)
        yaw = b0.center.yaw if alpha < 0.5 else b1.center.yaw
        vx = b0.velocity[0] + alpha * (b1.velocity[0] - b0.velocity[0])
        vy = b0.velocity[1] + alpha * (b1.velocity[1] - b0.velocity[1])
        out.append(
            OrientedBox(Pose2D(x, y, yaw), b0.length, b0.width, (vx, vy), b0.class_label)
        )
    return out


def check_trajectory(
    scenario: Scenario,
    frame_index: int,
    trajectory: Sequence[Pose2D],
    ego_footprint: tuple[float, float] | None = None,
    cfg: PlannerConfig | None = None,
) -> HazardReport:
    """Overlap-test every trajectory pose against future ground truth."""
    if not 0 <= frame_index < len(scenario.frames):
        raise IndexError(f"frame_index {frame_index} out of range")
    cfg = cfg or PlannerConfig()
    length, width = ego_footprint or scenario.ego_footprint
    t0 = scenario.frames[frame_index].timestamp
    dt = cfg.step_duration

    hazards: list[HazardEvent] = []
    for t, pose in enumerate(trajectory):
        offset = (t + 1) * dt
        ego_box = OrientedBox(pose, length, width, (0.0, 0.0), "other")
        for k, obs in enumerate(_future_boxes(scenario, frame_index, t0 + offset)):
            if boxes_overlap(ego_box, obs):
                hazards.append(HazardEvent(t + 1, offset, k, pose))
    return HazardReport(tuple(hazards))


def frame_hazard_flags(
    scenario: Scenario,
    frame_index: int,
    policy: FilterPolicy,
    params: OcmParams,
    cfg: PlannerConfig,
) -> tuple[bool, bool]:
    """(pred trajectory hazardous, gt trajectory hazardous) for one frame."""
    frame = scenario.frames[frame_index]
    kept = apply_policy(frame.detections, frame.ego, policy, params).kept
    gt_plan = plan(frame.ground_truth, frame.ego, cfg)
    pred_plan = plan([d.box for d in kept], frame.ego, cfg)
    gt_rep = check_trajectory(
        scenario, frame_index, most_probable_trajectory(gt_plan), cfg=cfg
    )
    pred_rep = check_trajectory(
        scenario, frame_index, most_probable_trajectory(pred_plan), cfg=cfg
    )
    return pred_rep.is_hazardous, gt_rep.is_hazardous


def hazard_rate(
    scenarios: Sequence[Scenario],
    policy: FilterPolicy,
    params: OcmParams,
    cfg: PlannerConfig,
) -> float:
    """Fraction of frames with a perception-induced hazard.

    A frame counts when the trajectory planned from the policy's kept
    detections is hazardous while the ground-truth-planned one is not.
    """
    if not scenarios:
        raise ValueError("hazard_rate needs at least one scenario")
    total = 0
    induced = 0
    for scenario in scenarios:
        for idx in range(len(scenario.frames)):
            pred_bad, gt_bad = frame_hazard_flags(scenario, idx, policy, params, cfg)
            total += 1
            if pred_bad and not gt_bad:
                induced += 1
    return induced / total


__all__ = [
    "HazardEvent",
    "HazardReport",
    "check_trajectory",
    "frame_hazard_flags",
    "hazard_rate",
]
