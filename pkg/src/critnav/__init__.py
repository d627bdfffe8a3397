"""critnav: criticality-aware detection filtering and planning impact.

Scores detected objects by how much they matter to the driving task
(distance, collision course, time to collision), filters detections with
confidence/criticality threshold policies, and measures the downstream
effect on a deterministic probabilistic planner via a KL divergence
between plans from ground truth and from predictions, plus an
overlap-based safety hazard check. Works on synthetic birdview scenarios
with a configurable detection noise model; no real detector required.
"""

from .criticality import (
    CriticalityScore,
    OcmParams,
    closest_point_of_approach,
    criticality,
    kappa_distance,
    kappa_route,
    kappa_ttc,
    time_to_collision,
)
from .filtering import (
    BinnedMap,
    Cascade,
    ConfidenceOnly,
    FilterOutcome,
    FilterPolicy,
    Override,
    apply_policy,
    policy_name,
)
from .hazard import HazardEvent, HazardReport, check_trajectory, hazard_rate
from .matching import (
    MatchResult,
    average_precision,
    match_boxes,
    match_frame,
    precision_recall,
    weighted_precision_recall,
)
from .planner import (
    PlanDistribution,
    PlannerConfig,
    PklScore,
    aggregate_pkl,
    most_probable_trajectory,
    pkl,
    plan,
)
from .render_svg import RenderOptions, render_frame
from .scenario_io import (
    ActorScript,
    GenerationError,
    NoiseModel,
    ScenarioSpec,
    ScenarioValidationError,
    build_preset,
    generate_scenario,
    load_scenario,
    noiseless,
    save_scenario,
    synthesize_detections,
)
from .scene import (
    CLASS_LABELS,
    Detection,
    EgoState,
    Frame,
    OrientedBox,
    Pose2D,
    Scenario,
    boxes_overlap,
)
from .sweep import (
    EvalCache,
    SweepRecord,
    SweepResult,
    SweepSpec,
    compare_policies,
    evaluate_policies,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "ActorScript",
    "BinnedMap",
    "CLASS_LABELS",
    "Cascade",
    "ConfidenceOnly",
    "CriticalityScore",
    "Detection",
    "EgoState",
    "EvalCache",
    "FilterOutcome",
    "FilterPolicy",
    "Frame",
    "GenerationError",
    "HazardEvent",
    "HazardReport",
    "MatchResult",
    "NoiseModel",
    "OcmParams",
    "OrientedBox",
    "Override",
    "PklScore",
    "PlanDistribution",
    "PlannerConfig",
    "Pose2D",
    "RenderOptions",
    "Scenario",
    "ScenarioSpec",
    "ScenarioValidationError",
    "SweepRecord",
    "SweepResult",
    "SweepSpec",
    "aggregate_pkl",
    "apply_policy",
    "average_precision",
    "boxes_overlap",
    "build_preset",
    "check_trajectory",
    "closest_point_of_approach",
    "compare_policies",
    "criticality",
    "evaluate_policies",
    "generate_scenario",
    "hazard_rate",
    "kappa_distance",
    "kappa_route",
    "kappa_ttc",
    "load_scenario",
    "match_boxes",
    "match_frame",
    "most_probable_trajectory",
    "noiseless",
    "pkl",
    "plan",
    "policy_name",
    "precision_recall",
    "render_frame",
    "run_sweep",
    "save_scenario",
    "synthesize_detections",
    "time_to_collision",
    "weighted_precision_recall",
]
