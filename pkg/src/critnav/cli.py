"""Command-line interface: gen, eval, sweep, render, hazard.

Every command resolves one RunConfig (file plus flag overrides), embeds
its hash in all outputs, and derives all randomness from declared seeds,
so rerunning an unchanged command reproduces outputs byte for byte.

Exit codes: 0 success; 1 when --fail-on-hazard is set and evaluation
found perception-induced hazards; 2 for usage or config errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .config import (
    ConfigError,
    RunConfig,
    config_hash,
    config_to_dict,
    load_config,
    policy_from_dict,
    policy_to_dict,
)
from .filtering import apply_policy
from .hazard import check_trajectory
from .matching import (
    ap_from_tables,
    frame_pr_table,
    match_boxes,
    precision_recall,
    weighted_masses,
)
from .planner import most_probable_trajectory, pkl, plan
from .render_svg import render_frame
from .scenario_io import (
    PRESETS,
    GenerationError,
    ScenarioValidationError,
    build_preset,
    load_scenario,
    save_scenario,
)
from .sweep import EvalCache, SweepSpec, format_table, run_sweep

USAGE_ERROR = 2
HAZARD_EXIT = 1


def _parse_seeds(text: str) -> list[int]:
    if ":" in text:
        lo, hi = text.split(":", 1)
        start, stop = int(lo), int(hi)
        if stop <= start:
            raise ValueError(f"empty seed range {text!r}")
        return list(range(start, stop))
    return [int(s) for s in text.split(",")]


def _resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if getattr(args, "policy", None):
        cfg = replace(cfg, policy=policy_from_dict(json.loads(args.policy)))
    if getattr(args, "out_dir", None):
        cfg = replace(cfg, output_dir=args.out_dir)
    if getattr(args, "scenarios", None):
        cfg = replace(cfg, scenarios=tuple(args.scenarios))
    return cfg


def _load_scenarios(cfg: RunConfig):
    if not cfg.scenarios:
        raise ConfigError("no scenarios given (flag or config.scenarios)")
    loaded = []
    for path in cfg.scenarios:
        if not Path(path).exists():
            raise FileNotFoundError(f"scenario file not found: {path}")
        loaded.append(load_scenario(path))
    return loaded


def _write_jsonl(path: Path, records) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


def cmd_gen(args) -> int:
    cfg = _resolve_config(args)
    seeds = _parse_seeds(args.seeds)
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    digest = config_hash(cfg)

    files = []
    for seed in seeds:
        scenario = build_preset(args.preset, seed)
        name = f"{args.preset}-{seed:08d}.scene.json"
        save_scenario(scenario, out_dir / name)
        files.append(name)
    manifest = {
        "config_hash": digest,
        "preset": args.preset,
        "seeds": seeds,
        "files": files,
        "config": config_to_dict(cfg),
    }
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    print(f"wrote {len(files)} scenarios and manifest.json to {out_dir}")
    return 0


def cmd_eval(args) -> int:
    cfg = _resolve_config(args)
    scenarios = _load_scenarios(cfg)
    digest = config_hash(cfg)
    policy = cfg.policy
    params, planner_cfg = cfg.ocm, cfg.planner

    records = [{"record": "header", "config_hash": digest, "policy": policy_to_dict(policy)}]
    pkl_totals = []
    induced_count = 0
    n_frames = 0
    masses = [0.0, 0.0, 0.0, 0.0]
    tables = []
    for scenario in scenarios:
        for frame_idx, frame in enumerate(scenario.frames):
            outcome = apply_policy(frame.detections, frame.ego, policy, params)
            kept = list(outcome.kept)
            gt_plan = plan(frame.ground_truth, frame.ego, planner_cfg)
            pred_plan = plan([d.box for d in kept], frame.ego, planner_cfg)
            score = pkl(gt_plan, pred_plan)
            gt_hazard = check_trajectory(
                scenario, frame_idx, most_probable_trajectory(gt_plan), cfg=planner_cfg
            ).is_hazardous
            pred_hazard = check_trajectory(
                scenario, frame_idx, most_probable_trajectory(pred_plan), cfg=planner_cfg
            ).is_hazardous
            match = match_boxes(frame.ground_truth, kept)
            prec, rec = precision_recall(match)
            md, td, mg, tg = weighted_masses(
                frame.ground_truth, kept, match, frame.ego, params
            )
            table = frame_pr_table(frame.ground_truth, kept)
            induced = pred_hazard and not gt_hazard

            pkl_totals.append(score.total)
            induced_count += 1 if induced else 0
            n_frames += 1
            for i, v in enumerate((md, td, mg, tg)):
                masses[i] += v
            tables.append(table)
            records.append(
                {
                    "record": "frame",
                    "scenario": scenario.id,
                    "frame": frame_idx,
                    "timestamp": frame.timestamp,
                    "kept": len(kept),
                    "dropped": len(frame.detections) - len(kept),
                    "tp": match.tp,
                    "fp": match.fp,
                    "fn": match.fn,
                    "precision": prec,
                    "recall": rec,
                    "pkl_total": score.total,
                    "pred_hazard": pred_hazard,
                    "gt_hazard": gt_hazard,
                    "induced_hazard": induced,
                }
            )

    ordered = sorted(pkl_totals)
    summary = {
        "record": "summary",
        "frames": n_frames,
        "mean_pkl": sum(pkl_totals) / n_frames,
        "median_pkl": ordered[(n_frames - 1) // 2],
        "hazard_rate": induced_count / n_frames,
        "weighted_precision": masses[0] / masses[1] if masses[1] > 0 else 1.0,
        "weighted_recall": masses[2] / masses[3] if masses[3] > 0 else 1.0,
        "avg_precision": ap_from_tables(tables),
    }
    records.append(summary)

    out = Path(args.out) if args.out else Path(cfg.output_dir) / "eval.jsonl"
    _write_jsonl(out, records)
    print(
        f"evaluated {n_frames} frames: median PKL {summary['median_pkl']:.3f}, "
        f"mean PKL {summary['mean_pkl']:.3f}, hazard rate {summary['hazard_rate']:.3f} "
        f"-> {out}"
    )
    if args.fail_on_hazard and induced_count > 0:
        print(f"{induced_count} perception-induced hazard frames", file=sys.stderr)
        return HAZARD_EXIT
    return 0


def cmd_sweep(args) -> int:
    cfg = _resolve_config(args)
    scenarios = _load_scenarios(cfg)
    digest = config_hash(cfg)
    settings = cfg.sweep
    family = args.family or settings.policy_family
    objective = args.objective or settings.objective
    spec = SweepSpec(
        scenarios=tuple(scenarios),
        policy_family=family,
        confidence_grid=settings.confidence_grid,
        criticality_grid=settings.criticality_grid,
        objective=objective,
    )
    result = run_sweep(
        spec, cfg.ocm, cfg.planner, workers=args.workers, cache=EvalCache()
    )

    doc = {
        "config_hash": digest,
        "n_scenarios": len(scenarios),
        "sweep": result.to_dict(),
    }
    out = Path(args.out) if args.out else Path(cfg.output_dir) / "sweep.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")

    table = format_table([result.best_record.to_dict()])
    print(table)
    print(f"{len(result.records)} records -> {out}")
    return 0


def cmd_render(args) -> int:
    cfg = _resolve_config(args)
    if not Path(args.scenario).exists():
        raise FileNotFoundError(f"scenario file not found: {args.scenario}")
    scenario = load_scenario(args.scenario)
    render_opts = cfg.render
    if args.layers:
        render_opts = replace(render_opts, layers=tuple(args.layers.split(",")))
    policy = cfg.policy if (args.policy or args.config) else None
    svg = render_frame(
        scenario,
        args.frame,
        params=cfg.ocm,
        cfg=cfg.planner,
        policy=policy,
        options=render_opts,
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(f"<!-- config_hash: {config_hash(cfg)} -->\n" + svg)
    print(f"rendered frame {args.frame} of {scenario.id} -> {out}")
    return 0


def cmd_hazard(args) -> int:
    cfg = _resolve_config(args)
    scenarios = _load_scenarios(cfg)
    digest = config_hash(cfg)
    policy = cfg.policy

    records = [{"record": "header", "config_hash": digest, "policy": policy_to_dict(policy)}]
    induced_count = 0
    n_frames = 0
    for scenario in scenarios:
        for frame_idx, frame in enumerate(scenario.frames):
            outcome = apply_policy(frame.detections, frame.ego, policy, cfg.ocm)
            gt_plan = plan(frame.ground_truth, frame.ego, cfg.planner)
            pred_plan = plan([d.box for d in outcome.kept], frame.ego, cfg.planner)
            gt_rep = check_trajectory(
                scenario, frame_idx, most_probable_trajectory(gt_plan), cfg=cfg.planner
            )
            pred_rep = check_trajectory(
                scenario, frame_idx, most_probable_trajectory(pred_plan), cfg=cfg.planner
            )
            induced = pred_rep.is_hazardous and not gt_rep.is_hazardous
            induced_count += 1 if induced else 0
            n_frames += 1
            records.append(
                {
                    "record": "frame",
                    "scenario": scenario.id,
                    "frame": frame_idx,
                    "pred": pred_rep.to_dict(),
                    "gt": gt_rep.to_dict(),
                    "induced_hazard": induced,
                }
            )
    rate = induced_count / n_frames
    records.append({"record": "summary", "frames": n_frames, "hazard_rate": rate})

    out = Path(args.out) if args.out else Path(cfg.output_dir) / "hazard.jsonl"
    _write_jsonl(out, records)
    print(f"checked {n_frames} frames: hazard rate {rate:.3f} -> {out}")
    if args.fail_on_hazard and induced_count > 0:
        print(f"{induced_count} perception-induced hazard frames", file=sys.stderr)
        return HAZARD_EXIT
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="critnav",
        description="Criticality-aware detection filtering and planning-impact toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scenarios=False, policy=False, hazard_flag=False):
        p.add_argument("--config", help="RunConfig JSON file")
        if scenarios:
            p.add_argument("scenarios", nargs="*", help="scenario .scene.json files")
            p.add_argument("--out", help="output file path")
        if policy:
            p.add_argument("--policy", help="inline policy JSON, e.g. "
                           '\'{"type":"cascade","tau_c":0.5,"tau_k":0.2}\'')
        if hazard_flag:
            p.add_argument("--fail-on-hazard", action="store_true",
                           help="exit 1 if any perception-induced hazard is found")

    p_gen = sub.add_parser("gen", help="generate preset scenarios with detections")
    p_gen.add_argument("--preset", required=True, choices=sorted(PRESETS))
    p_gen.add_argument("--seeds", required=True, help="N, A:B (half-open), or a,b,c")
    p_gen.add_argument("--out-dir", help="output directory (default: config output_dir)")
    p_gen.add_argument("--config", help="RunConfig JSON file")
    p_gen.set_defaults(fn=cmd_gen)

    p_eval = sub.add_parser("eval", help="metrics, PKL and hazards for one policy")
    common(p_eval, scenarios=True, policy=True, hazard_flag=True)
    p_eval.set_defaults(fn=cmd_eval)

    p_sweep = sub.add_parser("sweep", help="grid search thresholds for a policy family")
    common(p_sweep, scenarios=True)
    p_sweep.add_argument("--family", choices=("confidence_only", "cascade", "override"))
    p_sweep.add_argument("--objective", choices=("median_pkl", "mean_pkl", "hazard_rate"))
    p_sweep.add_argument("--workers", type=int, default=None)
    p_sweep.set_defaults(fn=cmd_sweep)

    p_render = sub.add_parser("render", help="render one frame to SVG")
    p_render.add_argument("--scenario", required=True)
    p_render.add_argument("--frame", type=int, required=True)
    p_render.add_argument("--out", required=True)
    p_render.add_argument("--layers", help="comma-separated layer names")
    p_render.add_argument("--policy", help="inline policy JSON for the kept/dropped split")
    p_render.add_argument("--config", help="RunConfig JSON file")
    p_render.set_defaults(fn=cmd_render)

    p_hazard = sub.add_parser("hazard", help="trajectory overlap reports for one policy")
    common(p_hazard, scenarios=True, policy=True, hazard_flag=True)
    p_hazard.set_defaults(fn=cmd_hazard)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (
        ConfigError,
        ScenarioValidationError,
        GenerationError,
        FileNotFoundError,
        IndexError,
        ValueError,
        json.JSONDecodeError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
