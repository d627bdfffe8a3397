"""Deterministic birdview SVG rendering.

SVG keeps renders diffable: elements are emitted in a fixed layer order,
coordinates are formatted with exactly three decimals, and nothing
time- or environment-dependent enters the output, so equal inputs give
byte-identical files.

The view is ego-centered with x to the right and y up (world axes; the
SVG y-flip happens in the projection). Layers: ground-truth boxes, kept
and dropped detection boxes, the ego footprint with a heading tick, the
most-probable trajectories planned from ground truth and from the kept
detections, and criticality labels per detection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .criticality import OcmParams
from .filtering import FilterPolicy, apply_policy
from .planner import PlannerConfig, most_probable_trajectory, plan
from .scene import Detection, OrientedBox, Scenario, box_corners

ALL_LAYERS = ("ground_truth", "detections", "ego", "trajectory", "criticality")

PX_PER_METER = 10.0


@dataclass(frozen=True)
class RenderOptions:
    extent: float = 45.0  # half-extent of the view in meters
    layers: tuple[str, ...] = ALL_LAYERS
    gt_color: str = "#2a9d34"
    kept_color: str = "#1f6fd0"
    dropped_color: str = "#c0392b"
    ego_color: str = "#111111"
    gt_trajectory_color: str = "#2a9d34"
    pred_trajectory_color: str = "#8e44ad"
    label_color: str = "#444444"
    background: str = "#ffffff"

    def __post_init__(self):
        if self.extent <= 0:
            raise ValueError("extent must be positive")
        for layer in self.layers:
            if layer not in ALL_LAYERS:
                raise ValueError(f"unknown layer {layer!r}; choose from {ALL_LAYERS}")


def _fmt(value: float) -> str:
    out = f"{value:.3f}"
    # avoid the two spellings of zero
    return "0.000" if out == "-0.000" else out


class _Projection:
    def __init__(self, center: tuple[float, float], extent: float):
        self.cx, self.cy = center
        self.extent = extent
        self.size = 2.0 * extent * PX_PER_METER

    def to_px(self, x: float, y: float) -> tuple[float, float]:
        px = (x - self.cx + self.extent) * PX_PER_METER
        py = (self.cy + self.extent - y) * PX_PER_METER
        return px, py

    def points_attr(self, pts) -> str:
        return " ".join("{},{}".format(*map(_fmt, self.to_px(x, y))) for x, y in pts)


def _finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


def _polygon(proj: _Projection, corners, style: str) -> str:
    if not all(_finite(x, y) for x, y in corners):
        return ""
    return f'<polygon points="{proj.points_attr(corners)}" {style}/>'


def _box_polygon(proj: _Projection, box: OrientedBox, style: str) -> str:
    return _polygon(proj, box_corners(box), style)


def render_frame(
    scenario: Scenario,
    frame_index: int,
    params: OcmParams | None = None,
    cfg: PlannerConfig | None = None,
    policy: FilterPolicy | None = None,
    options: RenderOptions | None = None,
) -> str:
    """Render one frame to an SVG string.

    With a policy, detections are split into kept (solid) and dropped
    (dashed) and the predicted trajectory is planned from the kept set;
    without one, all detections count as kept.
    """
    if not 0 <= frame_index < len(scenario.frames):
        raise IndexError(f"frame_index {frame_index} out of range")
    params = params or OcmParams()
    cfg = cfg or PlannerConfig()
    opt = options or RenderOptions()
    frame = scenario.frames[frame_index]
    ego = frame.ego
    proj = _Projection((ego.pose.x, ego.pose.y), opt.extent)

    if policy is not None:
        outcome = apply_policy(frame.detections, ego, policy, params)
        kept = list(outcome.kept)
        dropped = [det for det, _ in outcome.dropped]
        kappas = list(outcome.kappas)
    else:
        from .criticality import criticality

        kept = list(frame.detections)
        dropped = []
        kappas = [criticality(ego, d.box, params).kappa for d in frame.detections]

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(proj.size)}" '
        f'height="{_fmt(proj.size)}" viewBox="0 0 {_fmt(proj.size)} {_fmt(proj.size)}">',
        f'<rect width="{_fmt(proj.size)}" height="{_fmt(proj.size)}" fill="{opt.background}"/>',
    ]

    if "ground_truth" in opt.layers:
        style = f'fill="none" stroke="{opt.gt_color}" stroke-width="2"'
        for box in frame.ground_truth:
            parts.append(_box_polygon(proj, box, style))

    if "detections" in opt.layers:
        kept_style = f'fill="none" stroke="{opt.kept_color}" stroke-width="2"'
        drop_style = (
            f'fill="none" stroke="{opt.dropped_color}" stroke-width="2" '
            f'stroke-dasharray="6 4"'
        )
        for det in kept:
            parts.append(_box_polygon(proj, det.box, kept_style))
        for det in dropped:
            parts.append(_box_polygon(proj, det.box, drop_style))

    if "trajectory" in opt.layers:
        gt_plan = plan(frame.ground_truth, ego, cfg)
        pred_plan = plan([d.box for d in kept], ego, cfg)
        for p, color in (
            (gt_plan, opt.gt_trajectory_color),
            (pred_plan, opt.pred_trajectory_color),
        ):
            pts = [(ego.pose.x, ego.pose.y)]
            pts += [(pose.x, pose.y) for pose in most_probable_trajectory(p)]
            if all(_finite(x, y) for x, y in pts):
                parts.append(
                    f'<polyline points="{proj.points_attr(pts)}" fill="none" '
                    f'stroke="{color}" stroke-width="1.5" stroke-dasharray="2 3"/>'
                )

    if "ego" in opt.layers:
        style = f'fill="{opt.ego_color}" fill-opacity="0.85" stroke="none"'
        parts.append(_box_polygon(proj, ego.footprint_box(), style))
        tip_len = 0.75 * ego.footprint[0]
        hx = ego.pose.x + tip_len * math.cos(ego.pose.yaw)
        hy = ego.pose.y + tip_len * math.sin(ego.pose.yaw)
        if _finite(hx, hy):
            x1, y1 = proj.to_px(ego.pose.x, ego.pose.y)
            x2, y2 = proj.to_px(hx, hy)
            parts.append(
                f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
                f'stroke="{opt.ego_color}" stroke-width="2"/>'
            )

    if "criticality" in opt.layers:
        ordered: list[tuple[Detection, float]] = list(zip(frame.detections, kappas))
        for det, kappa in ordered:
            cx, cy = det.box.center.x, det.box.center.y
            if not _finite(cx, cy):
                continue
            px, py = proj.to_px(cx, cy)
            parts.append(
                f'<text x="{_fmt(px)}" y="{_fmt(py)}" font-size="11" '
                f'font-family="monospace" fill="{opt.label_color}">'
                f"k={kappa:.2f}</text>"
            )

    parts.append("</svg>")
    return "\n".join(p for p in parts if p) + "\n"


__all__ = ["ALL_LAYERS", "RenderOptions", "render_frame"]
