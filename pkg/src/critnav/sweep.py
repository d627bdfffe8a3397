"""Threshold grid search over filter policies.

The sweep evaluates every grid point exhaustively: per frame, detections
are filtered, plans are computed from the kept set and from ground truth,
and the divergence, hazard flags and detection metrics are aggregated per
configuration. Grids are small by design (the default is 11 x 11), so
enumeration beats any cleverer search and keeps results exactly
reproducible.

Many grid points keep the same detections on a given frame, so frame
evaluations are cached by kept-index set: the planner runs once per
distinct kept set, not once per configuration. An optional process pool
parallelizes over scenarios; partial aggregates merge in scenario order,
making parallel output identical to serial.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .criticality import OcmParams, criticality
from .filtering import Cascade, ConfidenceOnly, FilterPolicy, Override, policy_name
from .hazard import check_trajectory
from .matching import (
    DEFAULT_MATCH_RADIUS,
    FramePrTable,
    ap_from_tables,
    frame_pr_table,
    match_boxes,
    weighted_masses,
)
from .planner import PlannerConfig, most_probable_trajectory, plan, pkl
from .scene import Scenario

OBJECTIVES = ("median_pkl", "mean_pkl", "hazard_rate")
DEFAULT_GRID = tuple(i / 10 for i in range(11))
SWEEP_FAMILIES = ("confidence_only", "cascade", "override")


def _check_grid(name: str, grid: tuple[float, ...]) -> None:
    if not grid:
        raise ValueError(f"{name} must not be empty")
    if any(not 0.0 <= v <= 1.0 for v in grid):
        raise ValueError(f"{name} values must be in [0, 1]")
    if list(grid) != sorted(grid):
        raise ValueError(f"{name} must be sorted ascending")


@dataclass(frozen=True)
class SweepSpec:
    """One policy family's threshold grid over a scenario set.

    confidence_only ignores the criticality grid; cascade and override
    take the joint product of both grids. The binned_map family has no
    natural two-grid parameterization and is evaluated at fixed
    thresholds via evaluate_policies instead.
    """

    scenarios: tuple[Scenario, ...]
    policy_family: str = "confidence_only"
    confidence_grid: tuple[float, ...] = DEFAULT_GRID
    criticality_grid: tuple[float, ...] = DEFAULT_GRID
    objective: str = "median_pkl"
    match_radius: float = DEFAULT_MATCH_RADIUS

    def __post_init__(self):
        if not self.scenarios:
            raise ValueError("scenario set must not be empty")
        if self.policy_family not in SWEEP_FAMILIES:
            raise ValueError(
                f"unknown sweep family {self.policy_family!r}; choose from {SWEEP_FAMILIES}"
            )
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        _check_grid("confidence_grid", self.confidence_grid)
        if self.policy_family != "confidence_only":
            _check_grid("criticality_grid", self.criticality_grid)

    def policies(self) -> list[FilterPolicy]:
        if self.policy_family == "confidence_only":
            return [ConfidenceOnly(tc) for tc in self.confidence_grid]
        if self.policy_family == "cascade":
            return [
                Cascade(tc, tk)
                for tc in self.confidence_grid
                for tk in self.criticality_grid
            ]
        return [
            Override(tc, tk)
            for tc in self.confidence_grid
            for tk in self.criticality_grid
        ]


@dataclass(frozen=True)
class SweepRecord:
    policy: FilterPolicy
    median_pkl: float
    mean_pkl: float
    hazard_rate: float
    weighted_precision: float
    weighted_recall: float
    avg_precision: float
    n_frames: int

    def objective_value(self, objective: str) -> float:
        return getattr(self, objective)

    def to_dict(self) -> dict:
        return {
            "policy": policy_name(self.policy),
            "thresholds": self.policy.thresholds(),
            "median_pkl": self.median_pkl,
            "mean_pkl": self.mean_pkl,
            "hazard_rate": self.hazard_rate,
            "weighted_precision": self.weighted_precision,
            "weighted_recall": self.weighted_recall,
            "avg_precision": self.avg_precision,
            "n_frames": self.n_frames,
        }


@dataclass(frozen=True)
class SweepResult:
    records: tuple[SweepRecord, ...]
    best: dict[str, SweepRecord]  # per objective, ties to lower thresholds
    objective: str

    @property
    def best_record(self) -> SweepRecord:
        return self.best[self.objective]

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "records": [r.to_dict() for r in self.records],
            "best": {k: v.to_dict() for k, v in self.best.items()},
        }


def _tie_key(policy: FilterPolicy) -> tuple[float, float]:
    thr = policy.thresholds()
    tau_c = thr.get("tau_c", 0.0)
    tau_k = thr.get("tau_k", thr.get("tau_k_keep", 0.0))
    return (tau_c, tau_k)


@dataclass
class _FrameEval:
    pkl_total: float
    induced_hazard: bool
    masses: tuple[float, float, float, float]
    table: FramePrTable


@dataclass
class EvalCache:
    """Reusable per-(frame, kept set) evaluations, keyed by scenario id.

    Safe to share across sweep calls as long as params, planner config and
    match radius stay fixed and scenario ids are unique; the cache key
    deliberately excludes them.
    """

    frames: dict = field(default_factory=dict)
    gt_plans: dict = field(default_factory=dict)


def _frame_eval(
    scenario: Scenario,
    frame_idx: int,
    kept_idx: tuple[int, ...],
    params: OcmParams,
    cfg: PlannerConfig,
    match_radius: float,
    cache: EvalCache,
) -> _FrameEval:
    key = (scenario.id, frame_idx, kept_idx)
    hit = cache.frames.get(key)
    if hit is not None:
        return hit

    frame = scenario.frames[frame_idx]
    gt_key = (scenario.id, frame_idx)
    gt_entry = cache.gt_plans.get(gt_key)
    if gt_entry is None:
        gt_plan = plan(frame.ground_truth, frame.ego, cfg)
        gt_hazard = check_trajectory(
            scenario, frame_idx, most_probable_trajectory(gt_plan), cfg=cfg
        ).is_hazardous
        gt_entry = (gt_plan, gt_hazard)
        cache.gt_plans[gt_key] = gt_entry
    gt_plan, gt_hazard = gt_entry

    kept = [frame.detections[i] for i in kept_idx]
    pred_plan = plan([d.box for d in kept], frame.ego, cfg)
    pkl_total = pkl(gt_plan, pred_plan).total
    pred_hazard = check_trajectory(
        scenario, frame_idx, most_probable_trajectory(pred_plan), cfg=cfg
    ).is_hazardous
    match = match_boxes(frame.ground_truth, kept, match_radius)
    masses = weighted_masses(frame.ground_truth, kept, match, frame.ego, params)
    table = frame_pr_table(frame.ground_truth, kept, match_radius)
    out = _FrameEval(pkl_total, pred_hazard and not gt_hazard, masses, table)
    cache.frames[key] = out
    return out


@dataclass
class _Partial:
    """Per-policy aggregates over one scenario, mergeable across scenarios."""

    pkl_totals: list[float] = field(default_factory=list)
    induced: int = 0
    n_frames: int = 0
    masses: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    tables: list[FramePrTable] = field(default_factory=list)

    def absorb(self, ev: _FrameEval) -> None:
        self.pkl_totals.append(ev.pkl_total)
        self.induced += 1 if ev.induced_hazard else 0
        self.n_frames += 1
        self.masses = tuple(a + b for a, b in zip(self.masses, ev.masses))
        self.tables.append(ev.table)

    def merge(self, other: "_Partial") -> None:
        self.pkl_totals.extend(other.pkl_totals)
        self.induced += other.induced
        self.n_frames += other.n_frames
        self.masses = tuple(a + b for a, b in zip(self.masses, other.masses))
        self.tables.extend(other.tables)


def _evaluate_scenario(
    scenario: Scenario,
    policies: Sequence[FilterPolicy],
    params: OcmParams,
    cfg: PlannerConfig,
    match_radius: float,
    cache: EvalCache,
) -> list[_Partial]:
    partials = [_Partial() for _ in policies]
    for frame_idx, frame in enumerate(scenario.frames):
        kappas = [criticality(frame.ego, d.box, params).kappa for d in frame.detections]
        for p_idx, policy in enumerate(policies):
            kept_idx = tuple(
                i
                for i, det in enumerate(frame.detections)
                if policy.keep(det.confidence, kappas[i])[0]
            )
            ev = _frame_eval(
                scenario, frame_idx, kept_idx, params, cfg, match_radius, cache
            )
            partials[p_idx].absorb(ev)
    return partials


def _scenario_worker(args) -> list[_Partial]:
    scenario, policies, params, cfg, match_radius = args
    return _evaluate_scenario(scenario, policies, params, cfg, match_radius, EvalCache())


def _lower_median(values: list[float]) -> float:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def _record_from_partial(policy: FilterPolicy, part: _Partial) -> SweepRecord:
    md, td, mg, tg = part.masses
    return SweepRecord(
        policy=policy,
        median_pkl=_lower_median(part.pkl_totals),
        mean_pkl=sum(part.pkl_totals) / len(part.pkl_totals),
        hazard_rate=part.induced / part.n_frames,
        weighted_precision=md / td if td > 0 else 1.0,
        weighted_recall=mg / tg if tg > 0 else 1.0,
        avg_precision=ap_from_tables(part.tables),
        n_frames=part.n_frames,
    )


def evaluate_policies(
    policies: Sequence[FilterPolicy],
    scenarios: Sequence[Scenario],
    params: OcmParams,
    cfg: PlannerConfig,
    match_radius: float = DEFAULT_MATCH_RADIUS,
    workers: int | None = None,
    cache: EvalCache | None = None,
) -> list[SweepRecord]:
    """One SweepRecord per policy, aggregated over all scenario frames."""
    if not scenarios:
        raise ValueError("scenario set must not be empty")
    if not policies:
        raise ValueError("policies must not be empty")
    merged = [_Partial() for _ in policies]
    if workers and workers > 1:
        jobs = [(s, tuple(policies), params, cfg, match_radius) for s in scenarios]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for partials in pool.map(_scenario_worker, jobs):
                for m, p in zip(merged, partials):
                    m.merge(p)
    else:
        cache = cache if cache is not None else EvalCache()
        for scenario in scenarios:
            partials = _evaluate_scenario(
                scenario, policies, params, cfg, match_radius, cache
            )
            for m, p in zip(merged, partials):
                m.merge(p)
    return [_record_from_partial(pol, part) for pol, part in zip(policies, merged)]


def run_sweep(
    spec: SweepSpec,
    params: OcmParams | None = None,
    cfg: PlannerConfig | None = None,
    workers: int | None = None,
    cache: EvalCache | None = None,
) -> SweepResult:
    """Evaluate every SweepSpec grid point and rank per objective."""
    params = params or OcmParams()
    cfg = cfg or PlannerConfig()
    policies = spec.policies()
    records = evaluate_policies(
        policies,
        spec.scenarios,
        params,
        cfg,
        match_radius=spec.match_radius,
        workers=workers,
        cache=cache,
    )
    best = {
        obj: min(records, key=lambda r: (r.objective_value(obj), _tie_key(r.policy)))
        for obj in OBJECTIVES
    }
    return SweepResult(tuple(records), best, spec.objective)


def compare_policies(
    families: Sequence[str],
    scenarios: Sequence[Scenario],
    params: OcmParams | None = None,
    cfg: PlannerConfig | None = None,
    objective: str = "median_pkl",
    confidence_grid: tuple[float, ...] = DEFAULT_GRID,
    criticality_grid: tuple[float, ...] = DEFAULT_GRID,
    workers: int | None = None,
    cache: EvalCache | None = None,
) -> list[dict]:
    """One row per policy family at its own objective optimum."""
    if not families:
        raise ValueError("families must not be empty")
    cache = cache if cache is not None else EvalCache()
    rows = []
    for family in families:
        spec = SweepSpec(
            scenarios=tuple(scenarios),
            policy_family=family,
            confidence_grid=confidence_grid,
            criticality_grid=criticality_grid,
            objective=objective,
        )
        result = run_sweep(spec, params, cfg, workers=workers, cache=cache)
        row = result.best_record.to_dict()
        rows.append(row)
    return rows


def format_table(rows: Sequence[dict]) -> str:
    """Fixed-width text table of compare_policies rows."""
    headers = [
        ("policy", "policy"),
        ("thresholds", "thresholds"),
        ("median_pkl", "median PKL"),
        ("mean_pkl", "mean PKL"),
        ("hazard_rate", "hazard rate"),
        ("weighted_recall", "R_S"),
        ("weighted_precision", "P_R"),
        ("avg_precision", "AP"),
    ]

    def fmt(row: dict, key: str) -> str:
        value = row[key]
        if key == "thresholds":
            return " ".join(f"{k}={v:g}" for k, v in value.items())
        if isinstance(value, float):
            return f"{value:.3f}"
        return str(value)

    cells = [[fmt(row, key) for key, _ in headers] for row in rows]
    widths = [
        max(len(title), *(len(row[i]) for row in cells)) if cells else len(title)
        for i, (_, title) in enumerate(headers)
    ]
    lines = [
        "  ".join(title.ljust(widths[i]) for i, (_, title) in enumerate(headers)),
        "  ".join("-" * w for w in widths),
    ]
    for row in cells:
        lines.append("  ".join(row[i].ljust(widths[i]) for i in range(len(headers))))
    return "\n".join(lines)


__all__ = [
    "DEFAULT_GRID",
    "EvalCache",
    "OBJECTIVES",
    "SWEEP_FAMILIES",
    "SweepRecord",
    "SweepResult",
    "SweepSpec",
    "compare_policies",
    "evaluate_policies",
    "format_table",
    "run_sweep",
]
