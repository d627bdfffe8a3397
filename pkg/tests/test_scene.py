"""Scene primitives: yaw normalization, corners, overlap, validation."""

import math

import numpy as np
import pytest
from shapely.geometry import Polygon

from critnav.scene import (
    Detection,
    EgoState,
    Frame,
    OrientedBox,
    Pose2D,
    Scenario,
    box_corners,
    boxes_overlap,
    normalize_yaw,
    relative_state,
)

from conftest import make_box, make_ego, rotate


def shapely_box(box):
    return Polygon(box_corners(box))


class TestNormalizeYaw:
    def test_range(self):
        for raw in np.linspace(-20.0, 20.0, 401):
            y = normalize_yaw(float(raw))
            assert -math.pi < y <= math.pi

    def test_idempotent(self):
        for raw in np.linspace(-20.0, 20.0, 401):
            y = normalize_yaw(float(raw))
            assert normalize_yaw(y) == y

    def test_wraps_to_pi(self):
        assert normalize_yaw(-math.pi) == pytest.approx(math.pi)
        assert normalize_yaw(3 * math.pi) == pytest.approx(math.pi)


class TestValidation:
    def test_pose_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            Pose2D(float("nan"), 0.0)
        with pytest.raises(ValueError):
            Pose2D(0.0, float("inf"))

    def test_box_rejects_bad_dims(self):
        with pytest.raises(ValueError):
            make_box(0, 0, length=0.0)
        with pytest.raises(ValueError):
            make_box(0, 0, width=-1.0)

    def test_box_rejects_unknown_class(self):
        with pytest.raises(ValueError):
            make_box(0, 0, label="tank")

    def test_detection_confidence_bounds(self):
        box = make_box(0, 0)
        Detection(box, 0.0)
        Detection(box, 1.0)
        with pytest.raises(ValueError):
            Detection(box, 1.0001)
        with pytest.raises(ValueError):
            Detection(box, -0.1)

    def test_ego_footprint_positive(self):
        with pytest.raises(ValueError):
            EgoState(Pose2D(0, 0), footprint=(0.0, 2.0))

    def test_scenario_needs_frames(self):
        with pytest.raises(ValueError):
            Scenario("x", ())

    def test_scenario_timestamps_strictly_increase(self):
        ego = make_ego()
        frames = (Frame(0.0, ego), Frame(0.0, ego))
        with pytest.raises(ValueError):
            Scenario("x", frames)


class TestRelativeState:
    def test_subtraction(self):
        ego = make_ego()
        box = make_box(10, 0, vel=(-2, 0))
        assert relative_state(ego, box) == ((10.0, 0.0), (-2.0, 0.0))

    def test_identity(self):
        ego = make_ego(vel=(1, 1))
        box = make_box(0, 0, vel=(1, 1))
        assert relative_state(ego, box) == ((0.0, 0.0), (0.0, 0.0))

    def test_offset_ego(self):
        ego = make_ego(5, 5, vel=(1, 0))
        box = make_box(5, 10, vel=(1, 1))
        assert relative_state(ego, box) == ((0.0, 5.0), (0.0, 1.0))


class TestBoxCorners:
    def test_unit_square(self):
        corners = box_corners(make_box(0, 0, length=1, width=1))
        assert sorted(corners) == [(-0.5, -0.5), (-0.5, 0.5), (0.5, -0.5), (0.5, 0.5)]

    def test_quarter_turn_swaps_extents(self):
        corners = box_corners(make_box(0, 0, yaw=math.pi / 2, length=4, width=2))
        xs = [x for x, _ in corners]
        ys = [y for _, y in corners]
        assert max(xs) == pytest.approx(1.0)
        assert max(ys) == pytest.approx(2.0)

    def test_yaw_rotates_base_corners(self):
        # corners at yaw theta equal the yaw-0 corners rotated by theta
        base = box_corners(make_box(0, 0, length=4, width=2))
        for theta in (math.pi / 4, -1.1, 2.7):
            got = box_corners(make_box(0, 0, yaw=theta, length=4, width=2))
            expected = rotate(base, theta)
            for (gx, gy), (ex, ey) in zip(got, expected):
                assert gx == pytest.approx(ex, abs=1e-12)
                assert gy == pytest.approx(ey, abs=1e-12)

    def test_counterclockwise(self):
        corners = box_corners(make_box(3, -2, yaw=0.4, length=4, width=2))
        area2 = sum(
            x0 * y1 - x1 * y0
            for (x0, y0), (x1, y1) in zip(corners, corners[1:] + corners[:1])
        )
        assert area2 > 0


class TestBoxesOverlap:
    def test_identical(self):
        a = make_box(0, 0)
        assert boxes_overlap(a, a)

    def test_far_apart(self):
        assert not boxes_overlap(
            make_box(0, 0, length=1, width=1), make_box(10, 0, length=1, width=1)
        )

    def test_close_unit_squares(self):
        assert boxes_overlap(
            make_box(0, 0, length=1, width=1), make_box(0.9, 0, length=1, width=1)
        )

    def test_touching_edges_count(self):
        assert boxes_overlap(
            make_box(0, 0, length=1, width=1), make_box(1.0, 0, length=1, width=1)
        )

    def test_rotated_near_miss(self):
        # diamond corner reaches sqrt(2)/2 ~ 0.707 toward the square at x=1.6
        diamond = make_box(0, 0, yaw=math.pi / 4, length=1, width=1)
        square = make_box(1.6, 0, length=1, width=1)
        assert not boxes_overlap(diamond, square)
        assert boxes_overlap(diamond, make_box(1.2, 0, length=1, width=1))

    def test_symmetric_and_matches_shapely(self):
        rng = np.random.Generator(np.random.PCG64(7))
        for _ in range(500):
            a = make_box(
                rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-math.pi, math.pi),
                rng.uniform(0.5, 6), rng.uniform(0.5, 3),
            )
            b = make_box(
                rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-math.pi, math.pi),
                rng.uniform(0.5, 6), rng.uniform(0.5, 3),
            )
            got = boxes_overlap(a, b)
            assert got == boxes_overlap(b, a)
            assert got == shapely_box(a).intersects(shapely_box(b))


def test_footprint_box_matches_ego():
    ego = make_ego(3, 4, yaw=0.5, vel=(2, 0), footprint=(4.5, 2.0))
    box = ego.footprint_box()
    assert box.center == ego.pose
    assert (box.length, box.width) == ego.footprint
    assert box.velocity == ego.velocity


def test_at_time_advances_center_only():
    box = make_box(1, 2, yaw=0.3, vel=(2, -1))
    moved = box.at_time(0.5)
    assert (moved.center.x, moved.center.y) == (2.0, 1.5)
    assert moved.center.yaw == box.center.yaw
    assert moved.velocity == box.velocity
