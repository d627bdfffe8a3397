"""Matching, precision/recall, AP against a brute-force oracle."""

import math

import numpy as np
import pytest

from critnav.criticality import OcmParams
from critnav.matching import (
    ap_from_frames,
    ap_from_tables,
    average_precision,
    frame_pr_table,
    match_boxes,
    match_frame,
    precision_recall,
    weighted_masses,
    weighted_precision_recall,
)
from critnav.scene import Detection

from conftest import make_box, make_ego, make_frame, single_frame_scenario


def ap_oracle(frame_pairs, match_radius=2.0):
    """Brute force: re-match at every distinct confidence, take the best
    precision at recall >= r for each of the 101 recall levels."""
    confs = sorted({d.confidence for _, dets in frame_pairs for d in dets}, reverse=True)
    total_gt = sum(len(gt) for gt, _ in frame_pairs)
    points = []
    for t in confs:
        tp = fp = 0
        for gt, dets in frame_pairs:
            kept = [d for d in dets if d.confidence >= t]
            m = match_boxes(gt, kept, match_radius)
            tp += m.tp
            fp += m.fp
        if tp + fp == 0:
            continue
        precision = tp / (tp + fp)
        recall = tp / total_gt if total_gt > 0 else 1.0
        points.append((recall, precision))
    if not points:
        return 0.0
    total = 0.0
    for i in range(101):
        r = i / 100.0
        candidates = [p for rec, p in points if rec >= r]
        total += max(candidates) if candidates else 0.0
    return total / 101.0


def random_frame(rng, n_gt=None, n_det_max=20):
    gt = [
        make_box(rng.uniform(-10, 10), rng.uniform(-10, 10))
        for _ in range(n_gt if n_gt is not None else rng.integers(0, 6))
    ]
    dets = []
    for box in gt:
        if rng.random() < 0.8:
            dets.append(
                Detection(
                    make_box(
                        box.center.x + rng.normal(0, 0.7),
                        box.center.y + rng.normal(0, 0.7),
                    ),
                    float(rng.uniform(0.05, 1.0)),
                )
            )
    while len(dets) < n_det_max and rng.random() < 0.5:
        dets.append(
            Detection(
                make_box(rng.uniform(-12, 12), rng.uniform(-12, 12)),
                float(rng.uniform(0.05, 1.0)),
            )
        )
    return gt, dets[:n_det_max]


class TestMatchBoxes:
    def test_exact_centers_all_match(self):
        gt = [make_box(0, 0), make_box(5, 5)]
        dets = [Detection(make_box(0, 0), 0.9), Detection(make_box(5, 5), 0.8)]
        m = match_boxes(gt, dets)
        assert m.tp == 2 and m.fp == 0 and m.fn == 0

    def test_no_detections(self):
        m = match_boxes([make_box(0, 0)], [])
        assert m.fn == 1 and m.unmatched_gt == (0,)

    def test_greedy_prefers_nearer(self):
        gt = [make_box(0, 0)]
        dets = [Detection(make_box(1.5, 0), 0.9), Detection(make_box(0.5, 0), 0.4)]
        m = match_boxes(gt, dets)
        assert m.pairs[0][:2] == (0, 1)
        assert m.unmatched_det == (0,)

    def test_class_mismatch_never_pairs(self):
        gt = [make_box(0, 0, label="car")]
        dets = [Detection(make_box(0, 0, label="truck", length=8, width=2.5), 0.9)]
        m = match_boxes(gt, dets)
        assert m.tp == 0 and m.fp == 1 and m.fn == 1

    def test_radius_respected(self):
        gt = [make_box(0, 0)]
        dets = [Detection(make_box(2.5, 0), 0.9)]
        assert match_boxes(gt, dets, match_radius=2.0).tp == 0
        assert match_boxes(gt, dets, match_radius=3.0).tp == 1

    def test_each_box_used_once(self):
        rng = np.random.Generator(np.random.PCG64(5))
        for _ in range(100):
            gt, dets = random_frame(rng)
            m = match_boxes(gt, dets)
            gis = [gi for gi, _, _ in m.pairs]
            dis = [di for _, di, _ in m.pairs]
            assert len(set(gis)) == len(gis)
            assert len(set(dis)) == len(dis)
            for gi, di, d in m.pairs:
                assert d <= 2.0
                assert gt[gi].class_label == dets[di].box.class_label

    def test_rejects_nonpositive_radius(self):
        with pytest.raises(ValueError):
            match_boxes([], [], match_radius=0.0)


class TestPrecisionRecall:
    def test_arithmetic(self):
        gt = [make_box(i * 3.0, 0) for i in range(3)]
        dets = [Detection(make_box(i * 3.0, 0), 0.9) for i in range(3)]
        dets.append(Detection(make_box(20, 20), 0.9))
        p, r = precision_recall(match_boxes(gt, dets))
        assert (p, r) == (0.75, 1.0)

    def test_vacuous(self):
        assert precision_recall(match_boxes([], [])) == (1.0, 1.0)

    def test_half(self):
        gt = [make_box(0, 0), make_box(4, 0), make_box(30, 30), make_box(40, 40)]
        dets = [
            Detection(make_box(0, 0), 0.9),
            Detection(make_box(4, 0), 0.9),
            Detection(make_box(-20, 0), 0.9),
            Detection(make_box(-25, 0), 0.9),
        ]
        assert precision_recall(match_boxes(gt, dets)) == (0.5, 0.5)


class TestAveragePrecision:
    def test_perfect(self):
        gt = [make_box(0, 0), make_box(5, 0)]
        dets = [Detection(make_box(0, 0), 0.7), Detection(make_box(5, 0), 0.3)]
        assert average_precision(single_frame_scenario(gt, dets)) == pytest.approx(1.0)

    def test_no_detections_scores_zero(self):
        assert average_precision(single_frame_scenario([make_box(0, 0)], [])) == 0.0

    def test_matches_oracle_single_frames(self):
        rng = np.random.Generator(np.random.PCG64(17))
        for _ in range(60):
            gt, dets = random_frame(rng)
            got = ap_from_frames([(gt, dets)])
            want = ap_oracle([(gt, dets)])
            assert got == pytest.approx(want, abs=1e-12)

    def test_matches_oracle_pooled(self):
        rng = np.random.Generator(np.random.PCG64(18))
        for _ in range(20):
            pairs = [random_frame(rng) for _ in range(rng.integers(2, 6))]
            assert ap_from_frames(pairs) == pytest.approx(ap_oracle(pairs), abs=1e-12)

    def test_empty_tables(self):
        assert ap_from_tables([]) == 0.0


class TestFramePrTable:
    def test_threshold_rematch_reroutes(self):
        gt = [make_box(0, 0)]
        far = Detection(make_box(1.5, 0), 0.9)
        near = Detection(make_box(0.3, 0), 0.5)
        tab = frame_pr_table(gt, [far, near])
        assert tab.counts_at(0.9) == (1, 0)  # far det is the only candidate
        assert tab.counts_at(0.5) == (1, 1)  # near det wins, far becomes fp
        assert tab.counts_at(0.95) == (0, 0)


class TestWeightedMetrics:
    PARAMS = OcmParams(weights=(1.0, 0.0, 0.0))

    def test_full_recall(self):
        ego = make_ego()
        gt = [make_box(6, 0)]
        dets = [Detection(make_box(6, 0), 0.9)]
        frame = make_frame(0.0, ego, gt, dets)
        _, r_s = weighted_precision_recall(frame, match_frame(frame), ego, self.PARAMS)
        assert r_s == 1.0

    def test_missing_all_detections(self):
        ego = make_ego()
        gt = [make_box(6, 0)]
        frame = make_frame(0.0, ego, gt, ())
        _, r_s = weighted_precision_recall(frame, match_frame(frame), ego, self.PARAMS)
        assert r_s == 0.0

    def test_mass_ratio(self):
        # kappa_d: distance 6 -> 0.8, distance 24 -> 0.2; only the near one found
        ego = make_ego()
        gt = [make_box(6, 0), make_box(24, 0)]
        dets = [Detection(make_box(6, 0), 0.9)]
        frame = make_frame(0.0, ego, gt, dets)
        _, r_s = weighted_precision_recall(frame, match_frame(frame), ego, self.PARAMS)
        assert r_s == pytest.approx(0.8)

    def test_false_positive_never_helps(self):
        rng = np.random.Generator(np.random.PCG64(23))
        ego = make_ego(vel=(5, 0))
        params = OcmParams()
        for _ in range(100):
            gt, dets = random_frame(rng)
            frame = make_frame(0.0, ego, gt, dets)
            m = match_frame(frame)
            p0, r0 = precision_recall(m)
            wp0, wr0 = weighted_precision_recall(frame, m, ego, params)
            # a detection of a class no gt box has cannot match anything
            fp = Detection(make_box(rng.uniform(-8, 8), rng.uniform(-8, 8),
                                    label="cyclist", length=1.9, width=0.7), 0.99)
            frame2 = make_frame(0.0, ego, gt, list(dets) + [fp])
            m2 = match_frame(frame2)
            p1, r1 = precision_recall(m2)
            wp1, wr1 = weighted_precision_recall(frame2, m2, ego, params)
            assert p1 <= p0 and wp1 <= wp0 + 1e-12
            assert r1 == r0 and wr1 == pytest.approx(wr0)

    def test_masses_tuple(self):
        ego = make_ego()
        gt = [make_box(6, 0), make_box(24, 0)]
        dets = [Detection(make_box(6, 0), 0.9)]
        m = match_boxes(gt, dets)
        md, td, mg, tg = weighted_masses(gt, dets, m, ego, self.PARAMS)
        assert md == pytest.approx(0.8)
        assert td == pytest.approx(0.8)
        assert mg == pytest.approx(0.8)
        assert tg == pytest.approx(1.0)
