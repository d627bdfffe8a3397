"""Trajectory hazard checks against future ground truth."""

import pytest

from critnav.criticality import OcmParams
from critnav.filtering import ConfidenceOnly
from critnav.hazard import check_trajectory, frame_hazard_flags, hazard_rate
from critnav.planner import PlannerConfig
from critnav.scene import Pose2D, Scenario

from conftest import det, make_box, make_ego, make_frame, single_frame_scenario

TINY = (0.1, 0.1)


def two_frame_scenario(gt0, gt1, ego=None):
    ego = ego or make_ego()
    frames = (make_frame(0.0, ego, gt0, ()), make_frame(0.5, ego, gt1, ()))
    return Scenario("haz", frames)


class TestCheckTrajectory:
    def test_event_fields(self):
        box = make_box(10.0, 0.0)
        scen = two_frame_scenario([box], [box])
        traj = [Pose2D(0, 0), Pose2D(5, 0), Pose2D(10, 0)]
        report = check_trajectory(scen, 0, traj)
        assert report.is_hazardous
        assert len(report.hazards) == 1
        ev = report.hazards[0]
        assert ev.step_index == 3  # 1-based
        assert ev.time_offset == pytest.approx(0.75)
        assert ev.gt_box_index == 0
        assert (ev.ego_pose.x, ev.ego_pose.y) == (10.0, 0.0)

    def test_safe_trajectory(self):
        scen = two_frame_scenario([make_box(10, 8)], [make_box(10, 8)])
        report = check_trajectory(scen, 0, [Pose2D(k, 0.0) for k in range(5)])
        assert not report.is_hazardous
        assert report.hazards == ()

    def test_interpolates_between_frames(self):
        # box moves 0 -> 5 over the frame gap; at offset 0.25 it sits at 2.5
        scen = two_frame_scenario(
            [make_box(0, 5, vel=(10, 0))], [make_box(5, 5, vel=(10, 0))]
        )
        at_start = check_trajectory(scen, 0, [Pose2D(0, 5)], ego_footprint=TINY)
        midway = check_trajectory(scen, 0, [Pose2D(2.5, 5)], ego_footprint=TINY)
        assert not at_start.is_hazardous
        assert midway.is_hazardous

    def test_interpolation_yaw_from_nearer_frame(self):
        # long thin box turns 90 degrees between frames; at alpha 0.5 the
        # later frame's yaw applies, so the box extends along y
        b0 = make_box(0, 5, yaw=0.0, length=4.0, width=0.2)
        b1 = make_box(0, 5, yaw=1.5707963267948966, length=4.0, width=0.2)
        scen = two_frame_scenario([b0], [b1])
        probe = check_trajectory(scen, 0, [Pose2D(0, 3.2)], ego_footprint=TINY)
        assert probe.is_hazardous

    def test_extrapolates_past_last_frame(self):
        box = make_box(10, 0, vel=(-10, 0))
        scen = single_frame_scenario(gt=[box])
        traj = [Pose2D(0, 0)] * 6
        report = check_trajectory(scen, 0, traj, ego_footprint=TINY)
        assert report.is_hazardous
        first = report.hazards[0]
        # box reaches the ego between offsets 0.75 and 1.0
        assert first.step_index == 4
        assert first.time_offset == pytest.approx(1.0)

    def test_count_mismatch_uses_nearer_frame(self):
        scen = two_frame_scenario(
            [make_box(20, 0)], [make_box(20, 0), make_box(5, 5)]
        )
        report = check_trajectory(scen, 0, [Pose2D(5, 5)], ego_footprint=TINY)
        assert report.is_hazardous
        assert report.hazards[0].gt_box_index == 1

    def test_bad_frame_index(self):
        scen = single_frame_scenario(gt=[make_box(10, 0)])
        with pytest.raises(IndexError):
            check_trajectory(scen, 1, [Pose2D(0, 0)])
        with pytest.raises(IndexError):
            check_trajectory(scen, -1, [Pose2D(0, 0)])

    def test_report_to_dict(self):
        scen = single_frame_scenario(gt=[make_box(0, 0)])
        report = check_trajectory(scen, 0, [Pose2D(0, 0)])
        d = report.to_dict()
        assert d["is_hazardous"] is True
        assert d["hazards"][0]["step_index"] == 1
        assert d["hazards"][0]["ego_pose"] == {"x": 0.0, "y": 0.0, "yaw": 0.0}


class TestFrameFlags:
    def test_missing_blocker_induces_hazard(self):
        # gt plan detours around the parked car; the empty prediction
        # drives straight through it
        ego = make_ego(vel=(6.0, 0.0))
        box = make_box(8.0, 0.0)
        scen = single_frame_scenario(gt=[box], dets=(), ego=ego)
        pred_bad, gt_bad = frame_hazard_flags(
            scen, 0, ConfidenceOnly(0.0), OcmParams(), PlannerConfig()
        )
        assert pred_bad
        assert not gt_bad

    def test_perfect_detections_match_gt(self):
        ego = make_ego(vel=(6.0, 0.0))
        box = make_box(8.0, 0.0)
        scen = single_frame_scenario(gt=[box], dets=[det(box, 1.0)], ego=ego)
        pred_bad, gt_bad = frame_hazard_flags(
            scen, 0, ConfidenceOnly(0.0), OcmParams(), PlannerConfig()
        )
        assert pred_bad == gt_bad


class TestHazardRate:
    def test_perfect_perception_rate_zero(self):
        ego = make_ego(vel=(6.0, 0.0))
        box = make_box(8.0, 0.0)
        scen = single_frame_scenario(gt=[box], dets=[det(box, 1.0)], ego=ego)
        rate = hazard_rate([scen], ConfidenceOnly(0.0), OcmParams(), PlannerConfig())
        assert rate == 0.0

    def test_induced_hazard_counted(self):
        ego = make_ego(vel=(6.0, 0.0))
        box = make_box(8.0, 0.0)
        scen = single_frame_scenario(gt=[box], dets=(), ego=ego)
        rate = hazard_rate([scen], ConfidenceOnly(0.0), OcmParams(), PlannerConfig())
        assert rate == 1.0

    def test_empty_raises(self):
        with pytest.raises(ValueError):
            hazard_rate([], ConfidenceOnly(0.5), OcmParams(), PlannerConfig())
