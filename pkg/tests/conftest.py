"""Shared fixtures and the acceptance-line reporter.

Acceptance tests append one line per criterion to ACCEPTANCE_LINES; the
terminal-summary hook echoes them after the run so the pass/fail status
of each criterion is visible without -s.
"""

import math

import pytest

from critnav.scene import Detection, EgoState, Frame, OrientedBox, Pose2D, Scenario

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_box(x, y, yaw=0.0, length=4.5, width=1.9, vel=(0.0, 0.0), label="car"):
    return OrientedBox(Pose2D(x, y, yaw), length, width, vel, label)


def make_ego(x=0.0, y=0.0, yaw=0.0, vel=(0.0, 0.0), footprint=(4.5, 2.0)):
    return EgoState(Pose2D(x, y, yaw), vel, footprint)


def make_frame(ts, ego, gt=(), dets=()):
    return Frame(ts, ego, tuple(gt), tuple(dets))


def single_frame_scenario(gt=(), dets=(), ego=None, scenario_id="unit"):
    ego = ego or make_ego()
    return Scenario(scenario_id, (make_frame(0.0, ego, gt, dets),))


@pytest.fixture
def ego_origin():
    return make_ego()


def det(box, conf):
    return Detection(box, conf)


def rotate(points, theta):
    c, s = math.cos(theta), math.sin(theta)
    return [(x * c - y * s, x * s + y * c) for x, y in points]
