"""Scenario file format, generator, and detection-noise synthesis.

Scenarios live in versioned `.scene.json` files so the toolkit stays
dataset-independent; converters from real driving datasets are an
extension point, not part of this package. The generator builds small
birdview scenes (constant-speed ego on a straight or gently curving path,
constant-velocity background objects, optional scripted actors), and the
noise model turns ground truth into synthetic detections: distance-
dependent misses, pose/size/velocity jitter, Beta-distributed confidences
and Poisson false positives.

Randomness is split per frame by counter, so extending a scenario never
perturbs the noise of earlier frames. A jitter with sigma 0 draws nothing
from the stream and copies the field bit for bit, which makes the
noiseless model an exact identity: detections equal ground truth and the
downstream plan divergence is exactly zero.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match

from .scene import (
    CLASS_LABELS,
    Detection,
    EgoState,
    Frame,
    OrientedBox,
    Pose2D,
    Scenario,
)

FORMAT_VERSION = 1
SCENE_SUFFIX = ".scene.json"

# nominal (length, width) per class for generated objects
NOMINAL_SIZE = {
    "car": (4.5, 1.9),
    "truck": (8.0, 2.5),
    "bus": (12.0, 2.9),
    "pedestrian": (0.8, 0.8),
    "cyclist": (1.9, 0.7),
    "other": (3.0, 1.5),
}

MISS_PROB_CAP = 0.98


class ScenarioValidationError(ValueError):
    """A scenario file failed parsing or schema validation."""


class GenerationError(RuntimeError):
    """A scenario spec could not be realized (e.g. spawn area too crowded)."""


_NUMBER = {"type": "number"}
_BOX_PROPS = {
    "x": _NUMBER,
    "y": _NUMBER,
    "yaw": _NUMBER,
    "length": {"type": "number", "exclusiveMinimum": 0},
    "width": {"type": "number", "exclusiveMinimum": 0},
    "vx": _NUMBER,
    "vy": _NUMBER,
    "class": {"enum": list(CLASS_LABELS)},
}
_GT_BOX_SCHEMA = {
    "type": "object",
    "properties": _BOX_PROPS,
    "required": sorted(_BOX_PROPS),
    "additionalProperties": False,
}
_DET_SCHEMA = {
    "type": "object",
    "properties": {**_BOX_PROPS, "confidence": {"type": "number", "minimum": 0, "maximum": 1}},
    "required": sorted(_BOX_PROPS) + ["confidence"],
    "additionalProperties": False,
}
_EGO_SCHEMA = {
    "type": "object",
    "properties": {k: _NUMBER for k in ("x", "y", "yaw", "vx", "vy")},
    "required": ["x", "y", "yaw", "vx", "vy"],
    "additionalProperties": False,
}
_FRAME_SCHEMA = {
    "type": "object",
    "properties": {
        "timestamp": _NUMBER,
        "ego": _EGO_SCHEMA,
        "ground_truth": {"type": "array", "items": _GT_BOX_SCHEMA},
        "detections": {"type": "array", "items": _DET_SCHEMA},
    },
    "required": ["timestamp", "ego", "ground_truth", "detections"],
    "additionalProperties": False,
}
SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "format_version": {"const": FORMAT_VERSION},
        "id": {"type": "string", "minLength": 1},
        "frame_period": {"type": "number", "exclusiveMinimum": 0},
        "ego_footprint": {
            "type": "array",
            "items": {"type": "number", "exclusiveMinimum": 0},
            "minItems": 2,
            "maxItems": 2,
        },
        "frames": {"type": "array", "items": _FRAME_SCHEMA, "minItems": 1},
    },
    "required": ["format_version", "id", "frame_period", "ego_footprint", "frames"],
    "additionalProperties": False,
}

_VALIDATOR = Draft202012Validator(SCENARIO_SCHEMA)


def _box_to_dict(box: OrientedBox) -> dict:
    return {
        "x": box.center.x,
        "y": box.center.y,
        "yaw": box.center.yaw,
        "length": box.length,
        "width": box.width,
        "vx": box.velocity[0],
        "vy": box.velocity[1],
        "class": box.class_label,
    }


def _box_from_dict(d: dict) -> OrientedBox:
    return OrientedBox(
        Pose2D(d["x"], d["y"], d["yaw"]),
        d["length"],
        d["width"],
        (d["vx"], d["vy"]),
        d["class"],
    )


def scenario_to_dict(scenario: Scenario) -> dict:
    frames = []
    for f in scenario.frames:
        frames.append(
            {
                "timestamp": f.timestamp,
                "ego": {
                    "x": f.ego.pose.x,
                    "y": f.ego.pose.y,
                    "yaw": f.ego.pose.yaw,
                    "vx": f.ego.velocity[0],
                    "vy": f.ego.velocity[1],
                },
                "ground_truth": [_box_to_dict(b) for b in f.ground_truth],
                "detections": [
                    {**_box_to_dict(d.box), "confidence": d.confidence}
                    for d in f.detections
                ],
            }
        )
    return {
        "format_version": FORMAT_VERSION,
        "id": scenario.id,
        "frame_period": scenario.frame_period,
        "ego_footprint": list(scenario.ego_footprint),
        "frames": frames,
    }


def scenario_from_dict(doc: dict) -> Scenario:
    err = best_match(_VALIDATOR.iter_errors(doc))
    if err is not None:
        raise ScenarioValidationError(f"{err.json_path}: {err.message}")
    footprint = (doc["ego_footprint"][0], doc["ego_footprint"][1])
    frames = []
    prev_ts = None
    for k, fd in enumerate(doc["frames"]):
        ts = fd["timestamp"]
        if prev_ts is not None and ts <= prev_ts:
            raise ScenarioValidationError(
                f"$.frames[{k}].timestamp: timestamps must be strictly increasing"
            )
        prev_ts = ts
        e = fd["ego"]
        ego = EgoState(Pose2D(e["x"], e["y"], e["yaw"]), (e["vx"], e["vy"]), footprint)
        gt = tuple(_box_from_dict(b) for b in fd["ground_truth"])
        dets = tuple(
            Detection(_box_from_dict(d), d["confidence"]) for d in fd["detections"]
        )
        frames.append(Frame(ts, ego, gt, dets))
    return Scenario(doc["id"], tuple(frames), doc["frame_period"], footprint)


def load_scenario(path) -> Scenario:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioValidationError(
            f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}"
        ) from e
    return scenario_from_dict(doc)


def save_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=2) + "\n")


@dataclass(frozen=True)
class ActorScript:
    """A deliberately placed actor, positioned relative to the ego start pose.

    offset is (along-heading, lateral-left) meters; yaw_offset is relative
    to the ego heading; speed moves the actor along its own yaw.
    """

    class_label: str
    offset: tuple[float, float]
    yaw_offset: float = 0.0
    speed: float = 0.0
    length: float | None = None
    width: float | None = None


@dataclass(frozen=True)
class ScenarioSpec:
    id_prefix: str = "scenario"
    n_frames: int = 16
    frame_period: float = 0.5
    ego_start: Pose2D = Pose2D(0.0, 0.0, 0.0)
    ego_speed: float = 6.0
    ego_curvature: float = 0.0  # 1/m; yaw changes at curvature * speed rad/s
    ego_footprint: tuple[float, float] = (4.5, 2.0)
    n_background: int = 0
    background_classes: tuple[str, ...] = ("car",)
    background_speed: tuple[float, float] = (0.0, 0.0)
    # spawn corridor relative to the ego start: along-heading range and
    # absolute lateral range (side drawn at random)
    spawn_along: tuple[float, float] = (5.0, 45.0)
    spawn_lateral: tuple[float, float] = (8.0, 18.0)
    size_scale: tuple[float, float] = (0.9, 1.1)
    min_separation: float = 1.0
    max_spawn_retries: int = 100
    scripted: tuple[ActorScript, ...] = ()

    def __post_init__(self):
        if self.n_frames < 1:
            raise ValueError("n_frames must be >= 1")
        if self.frame_period <= 0:
            raise ValueError("frame_period must be positive")
        for label in self.background_classes:
            if label not in CLASS_LABELS:
                raise ValueError(f"unknown class label {label!r}")
        for lo, hi, name in (
            (*self.background_speed, "background_speed"),
            (*self.spawn_along, "spawn_along"),
            (*self.spawn_lateral, "spawn_lateral"),
            (*self.size_scale, "size_scale"),
        ):
            if lo > hi:
                raise ValueError(f"{name} range is inverted")


def _ego_state_at(spec: ScenarioSpec, t: float) -> EgoState:
    x0, y0, yaw0 = spec.ego_start.x, spec.ego_start.y, spec.ego_start.yaw
    v, c = spec.ego_speed, spec.ego_curvature
    if abs(c) < 1e-12:
        x = x0 + v * t * math.cos(yaw0)
        y = y0 + v * t * math.sin(yaw0)
        yaw = yaw0
    else:
        yaw = yaw0 + c * v * t
        x = x0 + (math.sin(yaw) - math.sin(yaw0)) / c
        y = y0 - (math.cos(yaw) - math.cos(yaw0)) / c
    vel = (v * math.cos(yaw), v * math.sin(yaw))
    return EgoState(Pose2D(x, y, yaw), vel, spec.ego_footprint)


def _scripted_box(spec: ScenarioSpec, script: ActorScript) -> OrientedBox:
    yaw0 = spec.ego_start.yaw
    ca, sa = math.cos(yaw0), math.sin(yaw0)
    ax, lat = script.offset
    x = spec.ego_start.x + ax * ca - lat * sa
    y = spec.ego_start.y + ax * sa + lat * ca
    yaw = yaw0 + script.yaw_offset
    nominal = NOMINAL_SIZE[script.class_label]
    length = script.length if script.length is not None else nominal[0]
    width = script.width if script.width is not None else nominal[1]
    vel = (script.speed * math.cos(yaw), script.speed * math.sin(yaw))
    return OrientedBox(Pose2D(x, y, yaw), length, width, vel, script.class_label)


def _circumradius(box: OrientedBox) -> float:
    return 0.5 * math.hypot(box.length, box.width)


def generate_scenario(spec: ScenarioSpec, seed: int) -> Scenario:
    """Build the ground-truth scenario for (spec, seed); detections stay empty.

    Spawn draws come from a single PCG64 stream seeded by (seed,); frame
    states are then derived analytically, so the scenario is a pure
    function of its inputs. Background objects spawn in the corridor with
    bounded retries against pairwise separation; a spec too crowded to
    satisfy raises GenerationError.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed,))))
    placed = [_scripted_box(spec, s) for s in spec.scripted]

    yaw0 = spec.ego_start.yaw
    ca, sa = math.cos(yaw0), math.sin(yaw0)
    for _ in range(spec.n_background):
        for attempt in range(spec.max_spawn_retries + 1):
            along = rng.uniform(*spec.spawn_along)
            lateral = rng.uniform(*spec.spawn_lateral)
            side = 1.0 if rng.random() < 0.5 else -1.0
            yaw = rng.uniform(-math.pi, math.pi)
            label = spec.background_classes[rng.integers(len(spec.background_classes))]
            scale = rng.uniform(*spec.size_scale)
            speed = rng.uniform(*spec.background_speed)

            lat = side * lateral
            x = spec.ego_start.x + along * ca - lat * sa
            y = spec.ego_start.y + along * sa + lat * ca
            nominal = NOMINAL_SIZE[label]
            box = OrientedBox(
                Pose2D(x, y, yaw),
                nominal[0] * scale,
                nominal[1] * scale,
                (speed * math.cos(yaw), speed * math.sin(yaw)),
                label,
            )
            min_ok = True
            for other in placed:
                limit = _circumradius(box) + _circumradius(other) + spec.min_separation
                if math.hypot(
                    box.center.x - other.center.x, box.center.y - other.center.y
                ) < limit:
                    min_ok = False
                    break
            if min_ok:
                placed.append(box)
                break
        else:
            raise GenerationError(
                f"could not place background object after {spec.max_spawn_retries} retries"
            )

    frames = []
    for k in range(spec.n_frames):
        t = k * spec.frame_period
        gt = tuple(box.at_time(t) for box in placed)
        frames.append(Frame(t, _ego_state_at(spec, t), gt, ()))
    return Scenario(
        f"{spec.id_prefix}-{seed:08d}",
        tuple(frames),
        spec.frame_period,
        spec.ego_footprint,
    )


@dataclass(frozen=True)
class NoiseModel:
    """Synthetic detector error model.

    Miss probability at distance d is clamp(miss_base + miss_per_meter*d,
    0, 0.98). Jitters are Gaussian (size jitter is relative); confidences
    are Beta draws. A Beta's second parameter may be 0 as the documented
    degenerate case: the distribution is then a point mass at 1.0 and no
    draw is consumed.
    """

    miss_base: float = 0.0
    miss_per_meter: float = 0.0
    center_jitter_sigma: float = 0.0
    size_jitter_sigma: float = 0.0
    yaw_jitter_sigma: float = 0.0
    velocity_jitter_sigma: float = 0.0
    tp_confidence: tuple[float, float] = (1.0, 0.0)
    fp_rate: float = 0.0
    fp_confidence: tuple[float, float] = (1.0, 0.0)
    fp_spawn_radius: float = 40.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.miss_base <= 1.0:
            raise ValueError("miss_base must be in [0, 1]")
        if self.miss_per_meter < 0:
            raise ValueError("miss_per_meter must be >= 0")
        for name in (
            "center_jitter_sigma",
            "size_jitter_sigma",
            "yaw_jitter_sigma",
            "velocity_jitter_sigma",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.fp_rate < 0 or self.fp_spawn_radius < 0:
            raise ValueError("fp_rate and fp_spawn_radius must be >= 0")
        for name, (alpha, beta) in (
            ("tp_confidence", self.tp_confidence),
            ("fp_confidence", self.fp_confidence),
        ):
            if alpha <= 0 or beta < 0:
                raise ValueError(f"{name}: need alpha > 0 and beta >= 0")

    def miss_probability(self, distance: float) -> float:
        return min(max(self.miss_base + self.miss_per_meter * distance, 0.0), MISS_PROB_CAP)


def noiseless(seed: int = 0) -> NoiseModel:
    """The identity noise model: detections reproduce ground truth exactly."""
    return NoiseModel(seed=seed)


def _draw_confidence(rng: np.random.Generator, params: tuple[float, float]) -> float:
    alpha, beta = params
    if beta == 0:
        return 1.0
    return float(rng.beta(alpha, beta))


def _frame_rng(seed: int, frame_idx: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, frame_idx))))


def synthesize_detections(scenario: Scenario, noise: NoiseModel) -> Scenario:
    """Fill every frame's detections from its ground truth plus noise.

    Per ground-truth box, in frame order: one uniform draw decides the
    miss; survivors get jitter draws (skipped per field when its sigma is
    0, copying the value bit for bit) and a confidence. False positives
    follow: a Poisson count, then per spawn a position uniform in the
    ego-centered disc, a yaw, a class, a size scale and a confidence.
    Detections list true positives in ground-truth order, then false
    positives.
    """
    frames = []
    for idx, frame in enumerate(scenario.frames):
        rng = _frame_rng(noise.seed, idx)
        dets: list[Detection] = []
        for box in frame.ground_truth:
            d = math.hypot(
                box.center.x - frame.ego.pose.x, box.center.y - frame.ego.pose.y
            )
            if rng.random() < noise.miss_probability(d):
                continue
            x, y = box.center.x, box.center.y
            if noise.center_jitter_sigma > 0:
                x += rng.normal(0.0, noise.center_jitter_sigma)
                y += rng.normal(0.0, noise.center_jitter_sigma)
            length, width = box.length, box.width
            if noise.size_jitter_sigma > 0:
                length *= max(1.0 + rng.normal(0.0, noise.size_jitter_sigma), 0.1)
                width *= max(1.0 + rng.normal(0.0, noise.size_jitter_sigma), 0.1)
            yaw = box.center.yaw
            if noise.yaw_jitter_sigma > 0:
                yaw += rng.normal(0.0, noise.yaw_jitter_sigma)
            vx, vy = box.velocity
            if noise.velocity_jitter_sigma > 0:
                vx += rng.normal(0.0, noise.velocity_jitter_sigma)
                vy += rng.normal(0.0, noise.velocity_jitter_sigma)
            conf = _draw_confidence(rng, noise.tp_confidence)
            dets.append(
                Detection(
                    OrientedBox(Pose2D(x, y, yaw), length, width, (vx, vy), box.class_label),
                    conf,
                )
            )
        if noise.fp_rate > 0:
            for _ in range(rng.poisson(noise.fp_rate)):
                theta = rng.uniform(-math.pi, math.pi)
                r = noise.fp_spawn_radius * math.sqrt(rng.random())
                x = frame.ego.pose.x + r * math.cos(theta)
                y = frame.ego.pose.y + r * math.sin(theta)
                yaw = rng.uniform(-math.pi, math.pi)
                label = CLASS_LABELS[rng.integers(len(CLASS_LABELS))]
                scale = rng.uniform(0.85, 1.15)
                nominal = NOMINAL_SIZE[label]
                conf = _draw_confidence(rng, noise.fp_confidence)
                dets.append(
                    Detection(
                        OrientedBox(
                            Pose2D(x, y, yaw),
                            nominal[0] * scale,
                            nominal[1] * scale,
                            (0.0, 0.0),
                            label,
                        ),
                        conf,
                    )
                )
        frames.append(replace(frame, detections=tuple(dets)))
    return replace(scenario, frames=tuple(frames))


def fig2_spec(seed: int = 0) -> ScenarioSpec:
    """Straight ego approach toward a parked bus on the path.

    The bus starts 55 m out and the scenario ends with roughly an 8.5 m
    gap, so late frames put the bus well inside the high-criticality zone
    while early frames keep it distant.
    """
    return ScenarioSpec(
        id_prefix="fig2",
        n_frames=16,
        frame_period=0.5,
        ego_speed=6.0,
        n_background=0,
        scripted=(ActorScript("bus", (55.0, 0.0), yaw_offset=math.pi),),
    )


def fig2_noise(seed: int) -> NoiseModel:
    return NoiseModel(
        miss_base=0.02,
        miss_per_meter=0.002,
        center_jitter_sigma=0.15,
        size_jitter_sigma=0.03,
        yaw_jitter_sigma=0.02,
        velocity_jitter_sigma=0.1,
        tp_confidence=(3.5, 2.2),
        fp_rate=1.5,
        fp_confidence=(2.5, 3.0),
        fp_spawn_radius=40.0,
        seed=seed,
    )


def clutter_spec(seed: int = 0) -> ScenarioSpec:
    """Parked cars flanking the ego corridor, overflown by distractor FPs.

    The lateral band keeps the cars relevant (nonzero criticality, real
    planning cost when a detection of one goes missing) without blocking
    the straight path; false positives from the noise model land mostly
    far out where criticality is zero.
    """
    return ScenarioSpec(
        id_prefix="clutter",
        n_frames=10,
        frame_period=0.5,
        ego_speed=6.0,
        n_background=9,
        background_classes=("car",),
        background_speed=(0.0, 0.0),
        spawn_along=(4.0, 46.0),
        spawn_lateral=(4.5, 7.5),
    )


def clutter_noise(seed: int) -> NoiseModel:
    return NoiseModel(
        miss_base=0.02,
        miss_per_meter=0.001,
        center_jitter_sigma=0.04,
        size_jitter_sigma=0.01,
        yaw_jitter_sigma=0.01,
        velocity_jitter_sigma=0.05,
        tp_confidence=(4.0, 1.6),
        fp_rate=5.0,
        fp_confidence=(4.0, 2.5),
        fp_spawn_radius=40.0,
        seed=seed,
    )


PRESETS = {
    "fig2": (fig2_spec, fig2_noise),
    "clutter": (clutter_spec, clutter_noise),
}


def build_preset(name: str, seed: int) -> Scenario:
    """Generate a preset scenario with synthesized detections."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    spec_fn, noise_fn = PRESETS[name]
    scenario = generate_scenario(spec_fn(seed), seed)
    return synthesize_detections(scenario, noise_fn(seed))


__all__ = [
    "ActorScript",
    "FORMAT_VERSION",
    "GenerationError",
    "NoiseModel",
    "PRESETS",
    "SCENARIO_SCHEMA",
    "ScenarioSpec",
    "ScenarioValidationError",
    "build_preset",
    "clutter_noise",
    "clutter_spec",
    "fig2_noise",
    "fig2_spec",
    "generate_scenario",
    "load_scenario",
    "noiseless",
    "save_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
    "synthesize_detections",
]
