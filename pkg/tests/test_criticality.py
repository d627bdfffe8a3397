"""Criticality model: component formulas, cutoffs, monotonicity."""

import math

import numpy as np
import pytest

from critnav.criticality import (
    OcmParams,
    closest_point_of_approach,
    criticality,
    kappa_distance,
    kappa_route,
    kappa_ttc,
    time_to_collision,
)

from conftest import make_box, make_ego

PARAMS = OcmParams()


class TestOcmParams:
    def test_defaults(self):
        assert PARAMS.d_max == 30.0
        assert PARAMS.r_max == 5.0
        assert PARAMS.t_max == 4.0
        assert sum(PARAMS.weights) == pytest.approx(1.0)

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            OcmParams(weights=(0.5, 0.5, 0.5))

    def test_positive_cutoffs(self):
        with pytest.raises(ValueError):
            OcmParams(d_max=0.0)
        with pytest.raises(ValueError):
            OcmParams(t_max=-1.0)

    def test_unknown_decay(self):
        with pytest.raises(ValueError):
            OcmParams(decay="cubic")


class TestClosestPointOfApproach:
    def test_oblique_approach(self):
        # minimize |(10,5) + t(-2,0)|: t = 5, closest point (0,5)
        t, d = closest_point_of_approach((10, 5), (-2, 0), horizon=10.0)
        assert t == pytest.approx(5.0)
        assert d == pytest.approx(5.0)

    def test_stationary(self):
        assert closest_point_of_approach((3, 4), (0, 0), 4.0) == (0.0, 5.0)

    def test_receding_clamps_to_zero(self):
        t, d = closest_point_of_approach((10, 0), (1, 0), 4.0)
        assert t == 0.0
        assert d == pytest.approx(10.0)

    def test_horizon_clamp(self):
        t, d = closest_point_of_approach((10, 0), (-1, 0), 4.0)
        assert t == 4.0
        assert d == pytest.approx(6.0)


class TestKappaDistance:
    def test_cutoff(self):
        assert kappa_distance(make_ego(), make_box(30, 0), PARAMS) == 0.0
        assert kappa_distance(make_ego(), make_box(35, 0), PARAMS) == 0.0

    def test_zero_distance(self):
        assert kappa_distance(make_ego(), make_box(0, 0), PARAMS) == 1.0

    def test_midpoint(self):
        assert kappa_distance(make_ego(), make_box(15, 0), PARAMS) == pytest.approx(0.5)


class TestKappaRoute:
    def test_head_on(self):
        ego = make_ego(vel=(5, 0))
        box = make_box(20, 0)  # rel vel (-5, 0), cpa at t=4 distance 0
        assert kappa_route(ego, box, PARAMS) == pytest.approx(1.0)

    def test_parallel_lane(self):
        ego = make_ego(vel=(5, 0))
        box = make_box(20, 10)  # cpa keeps the 10 m lateral offset
        assert kappa_route(ego, box, PARAMS) == 0.0

    def test_midpoint(self):
        ego = make_ego(vel=(5, 0))
        box = make_box(20, 2.5)  # d_cpa = r_max / 2
        assert kappa_route(ego, box, PARAMS) == pytest.approx(0.5)


class TestTimeToCollision:
    # footprints chosen so each half-diagonal is exactly 1 m: r_coll = 2
    EGO = make_ego(vel=(10, 0), footprint=(1.2, 1.6))

    def box(self, x, y=0.0):
        return make_box(x, y, length=1.2, width=1.6)

    def test_closing_quadratic(self):
        # |20 - 10t| = 2 -> t = 1.8
        assert time_to_collision(self.EGO, self.box(20)) == pytest.approx(1.8)

    def test_receding(self):
        ego = make_ego(vel=(-10, 0), footprint=(1.2, 1.6))
        assert time_to_collision(ego, self.box(20)) is None

    def test_already_overlapping(self):
        assert time_to_collision(self.EGO, self.box(1.0)) == 0.0

    def test_lateral_miss(self):
        assert time_to_collision(self.EGO, self.box(20, 5.0)) is None


class TestKappaTtc:
    EGO = make_ego(vel=(10, 0), footprint=(1.2, 1.6))

    def test_no_collision_is_zero(self):
        stationary = make_ego(footprint=(1.2, 1.6))
        box = make_box(20, 0, length=1.2, width=1.6)
        assert kappa_ttc(stationary, box, PARAMS) == 0.0

    def test_contact_now_is_one(self):
        box = make_box(1.0, 0, length=1.2, width=1.6)
        assert kappa_ttc(self.EGO, box, PARAMS) == 1.0

    def test_midpoint(self):
        # |22 - 10t| = 2 -> ttc = 2.0 = t_max / 2
        box = make_box(22, 0, length=1.2, width=1.6)
        assert kappa_ttc(self.EGO, box, PARAMS) == pytest.approx(0.5)


class TestCriticality:
    def test_degenerate_weights(self):
        params = OcmParams(weights=(1.0, 0.0, 0.0))
        score = criticality(make_ego(), make_box(18, 0), params)
        assert score.kappa == pytest.approx(score.kappa_d) == pytest.approx(0.4)

    def test_coincident_box_scores_one(self):
        score = criticality(make_ego(vel=(1, 0)), make_box(0, 0), PARAMS)
        assert (score.kappa_d, score.kappa_r, score.kappa_t) == (1.0, 1.0, 1.0)
        assert score.kappa == pytest.approx(1.0)

    def test_combination_is_weighted_sum(self):
        ego = make_ego(vel=(6, 0))
        rng = np.random.Generator(np.random.PCG64(3))
        for _ in range(200):
            box = make_box(
                rng.uniform(-40, 40), rng.uniform(-40, 40),
                vel=(rng.uniform(-8, 8), rng.uniform(-8, 8)),
            )
            s = criticality(ego, box, PARAMS)
            w = PARAMS.weights
            expected = w[0] * s.kappa_d + w[1] * s.kappa_r + w[2] * s.kappa_t
            assert s.kappa == expected

    def test_far_behind_scores_zero(self):
        ego = make_ego(vel=(6, 0))
        assert criticality(ego, make_box(-35, 0), PARAMS).kappa == 0.0

    def test_deterministic(self):
        ego = make_ego(vel=(3, 1))
        box = make_box(7.3, -2.1, yaw=0.8, vel=(-1.5, 0.2))
        a = criticality(ego, box, PARAMS)
        b = criticality(ego, box, PARAMS)
        assert a == b


class TestBoundsAndMonotonicity:
    def test_components_in_unit_interval(self):
        rng = np.random.Generator(np.random.PCG64(11))
        for _ in range(2000):
            ego = make_ego(
                rng.uniform(-10, 10), rng.uniform(-10, 10),
                vel=(rng.uniform(-15, 15), rng.uniform(-15, 15)),
            )
            box = make_box(
                rng.uniform(-60, 60), rng.uniform(-60, 60),
                yaw=rng.uniform(-math.pi, math.pi),
                length=rng.uniform(0.5, 12), width=rng.uniform(0.5, 3),
                vel=(rng.uniform(-15, 15), rng.uniform(-15, 15)),
            )
            s = criticality(ego, box, PARAMS)
            for v in (s.kappa_d, s.kappa_r, s.kappa_t, s.kappa):
                assert 0.0 <= v <= 1.0

    def test_kappa_d_nonincreasing_in_distance(self):
        ego = make_ego()
        rng = np.random.Generator(np.random.PCG64(12))
        for _ in range(500):
            d1, d2 = sorted(rng.uniform(0.0, 50.0, size=2))
            k1 = kappa_distance(ego, make_box(d1, 0), PARAMS)
            k2 = kappa_distance(ego, make_box(d2, 0), PARAMS)
            assert k1 >= k2

    def test_kappa_r_nonincreasing_in_lateral_offset(self):
        # head-on closing makes d_cpa equal the lateral offset
        ego = make_ego(vel=(10, 0))
        rng = np.random.Generator(np.random.PCG64(13))
        for _ in range(500):
            o1, o2 = sorted(rng.uniform(0.0, 10.0, size=2))
            k1 = kappa_route(ego, make_box(20, o1), PARAMS)
            k2 = kappa_route(ego, make_box(20, o2), PARAMS)
            assert k1 >= k2

    def test_kappa_t_nonincreasing_in_ttc(self):
        ego = make_ego(vel=(10, 0), footprint=(1.2, 1.6))
        rng = np.random.Generator(np.random.PCG64(14))
        for _ in range(500):
            x1, x2 = sorted(rng.uniform(3.0, 60.0, size=2))
            k1 = kappa_ttc(ego, make_box(x1, 0, length=1.2, width=1.6), PARAMS)
            k2 = kappa_ttc(ego, make_box(x2, 0, length=1.2, width=1.6), PARAMS)
            assert k1 >= k2


def test_quadratic_decay_shape():
    params = OcmParams(decay="quadratic")
    assert kappa_distance(make_ego(), make_box(15, 0), params) == pytest.approx(0.75)
    assert kappa_distance(make_ego(), make_box(30, 0), params) == 0.0
