"""Run configuration: one versioned JSON document for the whole pipeline.

Every command reads the same config shape and takes command-line
overrides on top. Parsing is strict: an unknown key anywhere in the
document is a hard error, so a typo in a threshold name cannot silently
fall back to a default. The resolved config (defaults filled in) hashes
to a stable identifier that all outputs embed, which is what makes rerun
outputs byte-identical and attributable.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .criticality import OcmParams
from .filtering import BinnedMap, Cascade, ConfidenceOnly, FilterPolicy, Override, policy_name
from .planner import PlannerConfig
from .render_svg import RenderOptions
from .scenario_io import NoiseModel
from .sweep import DEFAULT_GRID, OBJECTIVES, SWEEP_FAMILIES

CONFIG_VERSION = 1


class ConfigError(ValueError):
    """Config document malformed, unknown key, or invalid value."""


@dataclass(frozen=True)
class SweepSettings:
    policy_family: str = "cascade"
    confidence_grid: tuple[float, ...] = DEFAULT_GRID
    criticality_grid: tuple[float, ...] = DEFAULT_GRID
    objective: str = "median_pkl"

    def __post_init__(self):
        if self.policy_family not in SWEEP_FAMILIES:
            raise ConfigError(
                f"sweep.policy_family must be one of {SWEEP_FAMILIES}, got {self.policy_family!r}"
            )
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"sweep.objective must be one of {OBJECTIVES}")


@dataclass(frozen=True)
class RunConfig:
    scenarios: tuple[str, ...] = ()
    output_dir: str = "out"
    ocm: OcmParams = OcmParams()
    planner: PlannerConfig = PlannerConfig()
    policy: FilterPolicy = ConfidenceOnly(0.5)
    noise: NoiseModel = NoiseModel()
    sweep: SweepSettings = SweepSettings()
    render: RenderOptions = RenderOptions()


def _strict(section: str, data: dict, allowed) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"{section}: expected an object")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"{section}: unknown keys {unknown}")


def _build(section: str, cls, data: dict, tuple_fields=()):
    """Construct a dataclass from a dict, strictly and with list→tuple coercion."""
    fields = cls.__dataclass_fields__
    _strict(section, data, fields)
    kwargs = {}
    for key, value in data.items():
        if key in tuple_fields and isinstance(value, list):
            value = tuple(tuple(v) if isinstance(v, list) else v for v in value)
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{section}: {e}") from e


def policy_from_dict(data: dict) -> FilterPolicy:
    if not isinstance(data, dict) or "type" not in data:
        raise ConfigError("policy: expected an object with a 'type' key")
    kind = data["type"]
    body = {k: v for k, v in data.items() if k != "type"}
    classes = {
        "confidence_only": ConfidenceOnly,
        "cascade": Cascade,
        "override": Override,
        "binned_map": BinnedMap,
    }
    if kind not in classes:
        raise ConfigError(f"policy.type: unknown policy {kind!r}")
    tuple_fields = ("bins",) if kind == "binned_map" else ()
    return _build(f"policy({kind})", classes[kind], body, tuple_fields)


def policy_to_dict(policy: FilterPolicy) -> dict:
    return {"type": policy_name(policy), **policy.thresholds()}


_TOP_KEYS = (
    "config_version",
    "scenarios",
    "output_dir",
    "ocm",
    "planner",
    "policy",
    "noise",
    "sweep",
    "render",
)


def parse_config(doc: dict) -> RunConfig:
    _strict("config", doc, _TOP_KEYS)
    version = doc.get("config_version", CONFIG_VERSION)
    if version != CONFIG_VERSION:
        raise ConfigError(f"config_version: unsupported version {version!r}")

    scenarios = doc.get("scenarios", ())
    if not isinstance(scenarios, (list, tuple)) or not all(
        isinstance(s, str) for s in scenarios
    ):
        raise ConfigError("scenarios: expected a list of paths")
    output_dir = doc.get("output_dir", "out")
    if not isinstance(output_dir, str):
        raise ConfigError("output_dir: expected a string")

    ocm = _build("ocm", OcmParams, doc.get("ocm", {}), tuple_fields=("weights",))
    planner = _build("planner", PlannerConfig, doc.get("planner", {}))
    policy = (
        policy_from_dict(doc["policy"]) if "policy" in doc else ConfidenceOnly(0.5)
    )
    noise = _build(
        "noise", NoiseModel, doc.get("noise", {}),
        tuple_fields=("tp_confidence", "fp_confidence"),
    )
    sweep = _build(
        "sweep", SweepSettings, doc.get("sweep", {}),
        tuple_fields=("confidence_grid", "criticality_grid"),
    )
    render = _build("render", RenderOptions, doc.get("render", {}), tuple_fields=("layers",))
    return RunConfig(
        scenarios=tuple(scenarios),
        output_dir=output_dir,
        ocm=ocm,
        planner=planner,
        policy=policy,
        noise=noise,
        sweep=sweep,
        render=render,
    )


def load_config(path) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}"
        ) from e
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return parse_config(doc)


def config_to_dict(cfg: RunConfig) -> dict:
    """Fully resolved config document, defaults included."""
    return {
        "config_version": CONFIG_VERSION,
        "scenarios": list(cfg.scenarios),
        "output_dir": cfg.output_dir,
        "ocm": {
            "d_max": cfg.ocm.d_max,
            "r_max": cfg.ocm.r_max,
            "t_max": cfg.ocm.t_max,
            "weights": list(cfg.ocm.weights),
            "horizon": cfg.ocm.horizon,
            "decay": cfg.ocm.decay,
        },
        "planner": {
            "horizon": cfg.planner.horizon,
            "steps": cfg.planner.steps,
            "grid_half_extent": cfg.planner.grid_half_extent,
            "cell_size": cfg.planner.cell_size,
            "obstacle_inflation": cfg.planner.obstacle_inflation,
            "softmax_temperature": cfg.planner.softmax_temperature,
            "obstacle_cost_weight": cfg.planner.obstacle_cost_weight,
            "prior_weight": cfg.planner.prior_weight,
            "prob_floor": cfg.planner.prob_floor,
        },
        "policy": policy_to_dict(cfg.policy),
        "noise": {
            "miss_base": cfg.noise.miss_base,
            "miss_per_meter": cfg.noise.miss_per_meter,
            "center_jitter_sigma": cfg.noise.center_jitter_sigma,
            "size_jitter_sigma": cfg.noise.size_jitter_sigma,
            "yaw_jitter_sigma": cfg.noise.yaw_jitter_sigma,
            "velocity_jitter_sigma": cfg.noise.velocity_jitter_sigma,
            "tp_confidence": list(cfg.noise.tp_confidence),
            "fp_rate": cfg.noise.fp_rate,
            "fp_confidence": list(cfg.noise.fp_confidence),
            "fp_spawn_radius": cfg.noise.fp_spawn_radius,
            "seed": cfg.noise.seed,
        },
        "sweep": {
            "policy_family": cfg.sweep.policy_family,
            "confidence_grid": list(cfg.sweep.confidence_grid),
            "criticality_grid": list(cfg.sweep.criticality_grid),
            "objective": cfg.sweep.objective,
        },
        "render": {
            "extent": cfg.render.extent,
            "layers": list(cfg.render.layers),
            "gt_color": cfg.render.gt_color,
            "kept_color": cfg.render.kept_color,
            "dropped_color": cfg.render.dropped_color,
            "ego_color": cfg.render.ego_color,
            "gt_trajectory_color": cfg.render.gt_trajectory_color,
            "pred_trajectory_color": cfg.render.pred_trajectory_color,
            "label_color": cfg.render.label_color,
            "background": cfg.render.background,
        },
    }


def config_hash(cfg: RunConfig) -> str:
    canonical = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


__all__ = [
    "CONFIG_VERSION",
    "ConfigError",
    "RunConfig",
    "SweepSettings",
    "config_hash",
    "config_to_dict",
    "load_config",
    "parse_config",
    "policy_from_dict",
    "policy_to_dict",
]
