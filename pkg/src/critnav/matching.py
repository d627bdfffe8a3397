"""Prediction-to-ground-truth matching and detection metrics.

Matching is greedy nearest-first on center distance between same-class
boxes, the convention used by birdview detection benchmarks. On top of
the classical precision / recall / AP, this module computes the
criticality-weighted variants: reliability-weighted precision (share of
predicted criticality mass that is matched) and safety-weighted recall
(share of ground-truth criticality mass that is detected).
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .criticality import OcmParams, criticality
from .scene import Detection, EgoState, Frame, OrientedBox, Scenario

DEFAULT_MATCH_RADIUS = 2.0


@dataclass(frozen=True)
class MatchResult:
    """Greedy assignment: (gt_index, det_index, center_distance) triples."""

    pairs: tuple[tuple[int, int, float], ...]
    unmatched_gt: tuple[int, ...]
    unmatched_det: tuple[int, ...]

    @property
    def tp(self) -> int:
        return len(self.pairs)

    @property
    def fp(self) -> int:
        return len(self.unmatched_det)

    @property
    def fn(self) -> int:
        return len(self.unmatched_gt)


@dataclass(frozen=True)
class MetricsReport:
    precision: float
    recall: float
    avg_precision: float
    weighted_precision: float
    weighted_recall: float
    tp: int
    fp: int
    fn: int

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "avg_precision": self.avg_precision,
            "weighted_precision": self.weighted_precision,
            "weighted_recall": self.weighted_recall,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
        }


def match_boxes(
    gt_boxes: Sequence[OrientedBox],
    detections: Sequence[Detection],
    match_radius: float = DEFAULT_MATCH_RADIUS,
) -> MatchResult:
    """Greedy center-distance matching between same-class boxes.

    Candidate pairs within match_radius are taken in ascending distance
    order; ties break on lower gt index, then lower detection index. Each
    box is used at most once.
    """
    if match_radius <= 0:
        raise ValueError("match_radius must be positive")
    candidates = []
    for gi, gt in enumerate(gt_boxes):
        for di, det in enumerate(detections):
            if det.box.class_label != gt.class_label:
                continue
            d = math.hypot(det.box.center.x - gt.center.x, det.box.center.y - gt.center.y)
            if d <= match_radius:
                candidates.append((d, gi, di))
    candidates.sort()

    pairs = []
    used_gt: set[int] = set()
    used_det: set[int] = set()
    for d, gi, di in candidates:
        if gi in used_gt or di in used_det:
            continue
        pairs.append((gi, di, d))
        used_gt.add(gi)
        used_det.add(di)
    return MatchResult(
        pairs=tuple(pairs),
        unmatched_gt=tuple(i for i in range(len(gt_boxes)) if i not in used_gt),
        unmatched_det=tuple(i for i in range(len(detections)) if i not in used_det),
    )


def match_frame(frame: Frame, match_radius: float = DEFAULT_MATCH_RADIUS) -> MatchResult:
    return match_boxes(frame.ground_truth, frame.detections, match_radius)


def precision_recall(match: MatchResult) -> tuple[float, float]:
    """Standard counts; vacuous cases (no detections / no gt) score 1."""
    tp, fp, fn = match.tp, match.fp, match.fn
    precision = tp / (tp + fp) if tp + fp > 0 else 1.0
    recall = tp / (tp + fn) if tp + fn > 0 else 1.0
    return precision, recall


FramePair = tuple[Sequence[OrientedBox], Sequence[Detection]]


@dataclass(frozen=True)
class FramePrTable:
    """Per-frame tp/fp counts as a step function of the confidence threshold.

    Counts change only at the frame's own confidence values, sorted
    descending; entry i holds the counts for any threshold in
    (confidences[i+1], confidences[i]]. A threshold above confidences[0]
    keeps nothing.
    """

    confidences: tuple[float, ...]
    tps: tuple[int, ...]
    fps: tuple[int, ...]
    n_gt: int

    def counts_at(self, threshold: float) -> tuple[int, int]:
        idx = -1
        for i, c in enumerate(self.confidences):
            if c >= threshold:
                idx = i
            else:
                break
        if idx < 0:
            return 0, 0
        return self.tps[idx], self.fps[idx]


def frame_pr_table(
    gt_boxes: Sequence[OrientedBox],
    detections: Sequence[Detection],
    match_radius: float = DEFAULT_MATCH_RADIUS,
) -> FramePrTable:
    """Match the frame once per distinct confidence, from highest down.

    Matching is redone from scratch at each threshold (not incrementally),
    so removing a detection can re-route a match to a farther one.
    """
    confs = sorted({d.confidence for d in detections}, reverse=True)
    tps, fps = [], []
    for t in confs:
        kept = [d for d in detections if d.confidence >= t]
        m = match_boxes(gt_boxes, kept, match_radius)
        tps.append(m.tp)
        fps.append(m.fp)
    return FramePrTable(tuple(confs), tuple(tps), tuple(fps), len(gt_boxes))


def ap_from_tables(tables: Sequence[FramePrTable]) -> float:
    """Area under the pooled precision-recall curve, 101-point interpolation.

    Only operating points with at least one kept detection participate, so
    a detector that outputs nothing scores 0 against nonempty ground truth.
    """
    thresholds = sorted({c for tab in tables for c in tab.confidences}, reverse=True)
    if not thresholds:
        return 0.0
    total_gt = sum(tab.n_gt for tab in tables)

    # Pooled counts at every global threshold; each frame steps only at its
    # own confidences, located in one vectorized search per frame.
    thr = np.asarray(thresholds)
    tp = np.zeros(len(thresholds), dtype=np.int64)
    fp = np.zeros(len(thresholds), dtype=np.int64)
    for tab in tables:
        if not tab.confidences:
            continue
        # number of this frame's confidences >= each pooled threshold
        k = np.searchsorted(-np.asarray(tab.confidences), -thr, side="right")
        hit = k > 0
        idx = k[hit] - 1
        tp[hit] += np.asarray(tab.tps, dtype=np.int64)[idx]
        fp[hit] += np.asarray(tab.fps, dtype=np.int64)[idx]

    points = []
    for k in range(len(thresholds)):
        kept = int(tp[k] + fp[k])
        if kept == 0:
            continue
        precision = int(tp[k]) / kept
        recall = int(tp[k]) / total_gt if total_gt > 0 else 1.0
        points.append((recall, precision))
    if not points:
        return 0.0
    # Best precision at recall >= r, via suffix max over recall-sorted points.
    points.sort()
    recalls = [r for r, _ in points]
    best = [0.0] * len(points)
    running = 0.0
    for i in range(len(points) - 1, -1, -1):
        running = max(running, points[i][1])
        best[i] = running
    total = 0.0
    for i in range(101):
        r = i / 100.0
        lo = bisect_left(recalls, r)
        if lo < len(points):
            total += best[lo]
    return total / 101.0


def ap_from_frames(frames: Iterable[FramePair], match_radius: float = DEFAULT_MATCH_RADIUS) -> float:
    return ap_from_tables([frame_pr_table(gt, dets, match_radius) for gt, dets in frames])


def average_precision(scenario: Scenario, match_radius: float = DEFAULT_MATCH_RADIUS) -> float:
    return ap_from_frames(((f.ground_truth, f.detections) for f in scenario.frames), match_radius)


def weighted_masses(
    gt_boxes: Sequence[OrientedBox],
    detections: Sequence[Detection],
    match: MatchResult,
    ego: EgoState,
    params: OcmParams,
) -> tuple[float, float, float, float]:
    """Criticality mass split by match status.

    Returns (matched detection mass, total detection mass,
    matched ground-truth mass, total ground-truth mass). Detections are
    scored on their own predicted kinematics.
    """
    det_kappa = [criticality(ego, d.box, params).kappa for d in detections]
    gt_kappa = [criticality(ego, g, params).kappa for g in gt_boxes]
    matched_det = {di for _, di, _ in match.pairs}
    matched_gt = {gi for gi, _, _ in match.pairs}
    return (
        sum(det_kappa[i] for i in matched_det),
        sum(det_kappa),
        sum(gt_kappa[i] for i in matched_gt),
        sum(gt_kappa),
    )


def weighted_precision_recall(
    frame: Frame,
    match: MatchResult,
    ego: EgoState,
    params: OcmParams,
) -> tuple[float, float]:
    """Reliability-weighted precision and safety-weighted recall.

    Ratios of matched to total criticality mass; 1 when no mass is at
    stake on that side.
    """
    md, td, mg, tg = weighted_masses(frame.ground_truth, frame.detections, match, ego, params)
    p_r = md / td if td > 0 else 1.0
    r_s = mg / tg if tg > 0 else 1.0
    return p_r, r_s
