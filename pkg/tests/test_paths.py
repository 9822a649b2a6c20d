import io
import math

import numpy as np
import pytest

from fragrect.errors import DomainError
from fragrect.paths import (
    GoodConstraint,
    GoodSetSpec,
    GridBall,
    HybridPath,
    LevyBall,
    PathSet,
    PLGrid,
    SupBall,
    Track,
    box_envelope,
    grid_distance,
    is_good,
    levy_distance,
    levy_track_distance,
    levy_track_within,
    levy_within,
    path_from_csv,
    path_to_csv,
    quantize_to_cover,
    singular_increment,
    sup_distance,
    sup_track_distance,
    tube_set,
)
from fragrect.verify import random_e_track


def random_pair(rng, **kw):
    return HybridPath(random_e_track(rng, **kw), random_e_track(rng, **kw))


class TestTrack:
    def test_eval_zero_path(self):
        z = HybridPath.zero()
        for s in (0.0, 0.3, 1.0):
            assert z.eval(s) == (0.0, 0.0)

    def test_eval_linear_interpolation(self):
        d = HybridPath.linear(1.0, 1.0)
        assert d.eval(0.25) == (0.25, 0.25)

    def test_jump_right_continuity(self):
        tr = Track.from_jumps([0.5], [0.2])
        assert tr.eval(0.5) == 0.2
        assert tr.eval_left(0.5) == 0.0
        assert tr.eval(0.499) == 0.0

    def test_eval_outside_domain_raises(self):
        with pytest.raises(DomainError):
            HybridPath.zero().eval(1.5)

    def test_invariants_enforced(self):
        with pytest.raises(DomainError):
            Track([0.0, 0.5, 1.0], [0.0, 0.4, 0.2])  # decreasing
        with pytest.raises(DomainError):
            Track([0.0, 1.0], [0.1, 0.5])  # nonzero start
        with pytest.raises(DomainError):
            Track([0.0, 0.5, 0.5, 1.0], [0.0, 0.1, 0.2, 0.3])  # duplicate time

    def test_coincident_jumps_merge(self):
        tr = Track.from_jumps([0.5, 0.5], [0.1, 0.2])
        assert tr.eval(0.5) == pytest.approx(0.3)
        assert singular_increment(tr, 0.0, 1.0) == pytest.approx(0.3)


class TestMetrics:
    def test_levy_identity(self):
        f = HybridPath.linear(1.0, 1.0)
        assert levy_distance(f, f) == 0.0

    def test_levy_slope_gap(self):
        # endpoint gap forces the corridor radius to 1
        d = levy_distance(HybridPath.linear(1, 1), HybridPath.linear(2, 2))
        assert d == pytest.approx(1.0, abs=1e-9)

    def test_levy_pure_jump_vs_zero(self):
        step = Track.from_jumps([0.5], [0.3])
        assert levy_track_distance(step, Track.zero()) == pytest.approx(0.3, abs=1e-9)

    def test_levy_jump_shift_insensitive(self):
        # two unit steps at nearby times are close in the corridor metric
        a = Track.from_jumps([0.50], [1.0])
        b = Track.from_jumps([0.52], [1.0])
        assert levy_track_distance(a, b) <= 0.021

    def test_sup_distance_examples(self):
        assert sup_distance(HybridPath.linear(1, 1), HybridPath.linear(0.5, 0.5)) == 0.5
        f = HybridPath.linear(1.0, 1.0)
        assert sup_distance(f, f) == 0.0

    def test_grid_distance_examples(self):
        diag = HybridPath.linear(1, 1)
        zero = HybridPath.zero()
        assert grid_distance(diag, zero, 1) == 1.0
        sq = HybridPath(
            Track.from_pl([0, 0.5, 1], [0, 0.25, 1]),
            Track.from_pl([0, 0.5, 1], [0, 0.25, 1]),
        )
        assert grid_distance(diag, sq, 2) == pytest.approx(0.25)

    def test_sup_dominates_grid(self, rng):
        for _ in range(50):
            f, g = random_pair(rng), random_pair(rng)
            assert sup_distance(f, g) >= grid_distance(f, g, 7) - 1e-12

    def test_levy_below_sup(self, rng):
        for _ in range(50):
            f, g = random_pair(rng), random_pair(rng)
            assert levy_distance(f, g) <= sup_distance(f, g) + 1e-9

    def test_levy_zero_implies_equal_at_continuity_points(self, rng):
        f = random_pair(rng)
        assert levy_distance(f, f) == 0.0

    def test_levy_within_threshold(self, rng):
        for _ in range(30):
            a, b = random_e_track(rng), random_e_track(rng)
            d = levy_track_distance(a, b)
            assert levy_track_within(a, b, d + 1e-9)
            if d > 1e-6:
                assert not levy_track_within(a, b, d - 1e-6)


class TestGoodSets:
    def test_boundary_inclusive(self):
        M = 2.0
        f = HybridPath.linear(M, M)
        assert is_good(f, GoodSetSpec(M)).ok

    def test_violation_with_witness(self):
        M = 2.0
        f = HybridPath.linear(M + 1.0, M + 1.0)
        res = is_good(f, GoodSetSpec(M))
        assert not res.ok
        assert res.witness is not None and res.witness > 0.0

    def test_zero_path_slack_threshold(self):
        # zero path is (M, T)-good iff the slack covers s/M at s = 1,
        # i.e. 2 T^{-2/3} >= 1/M, i.e. T <= (2M)^{3/2}
        M = 2.0
        good_T = (2.0 * M) ** 1.5 - 1.0  # slack > 1/M
        bad_T = 1e6  # slack tiny
        z = HybridPath.zero()
        assert is_good(z, GoodSetSpec(M, good_T)).ok
        res = is_good(z, GoodSetSpec(M, bad_T))
        assert not res.ok
        assert res.witness == pytest.approx(1.0)

    def test_spec_validation(self):
        with pytest.raises(DomainError):
            GoodSetSpec(1.0)
        with pytest.raises(DomainError):
            GoodSetSpec(2.0, 0.5)


class TestQuantize:
    def test_zero(self):
        g = quantize_to_cover(HybridPath.zero(), 4)
        assert np.all(g.values == 0.0)

    def test_diag_exact(self):
        g = quantize_to_cover(HybridPath.linear(1, 1), 2)
        assert np.array_equal(g.values[0], [0.0, 0.5, 1.0])

    def test_third_slope(self):
        g = quantize_to_cover(HybridPath.linear(1.0 / 3.0, 1.0 / 3.0), 2)
        assert np.array_equal(g.values[0], [0.0, 0.0, 0.25])


class TestPathSet:
    def test_contains_tube(self):
        center = HybridPath.linear(1, 1)
        pset = tube_set(center, 0.25)
        assert pset.contains(HybridPath.linear(1.1, 0.9))
        assert not pset.contains(HybridPath.linear(1.3, 1.0))

    def test_ball_radius_validation(self):
        with pytest.raises(DomainError):
            PathSet(HybridPath.zero(), [SupBall(0.0)])

    def test_box_envelope_tube(self):
        center = HybridPath.linear(1, 1)
        pset = tube_set(center, 0.1)
        box = box_envelope(pset, 10)
        # at s = 0.5: center 0.5, radius 0.1
        assert box.x_lo[5] == pytest.approx(0.4)
        assert box.x_hi[5] == pytest.approx(0.6)
        assert box.x_lo[0] == box.x_hi[0] == 0.0
        assert not box.empty

    def test_box_envelope_good_clipping(self):
        center = HybridPath.linear(1, 1)
        pset = tube_set(center, 0.5, M=2.0, T=None)
        box = box_envelope(pset, 10)
        # upper clipped at M*s: at s=0.2 center+r = 0.7 > 0.4 = 2*0.2
        assert box.x_hi[2] == pytest.approx(0.4)

    def test_box_envelope_empty_flag(self):
        # ball forced below the lower envelope
        center = HybridPath.zero()
        pset = PathSet(center, [SupBall(0.01), GoodConstraint(1.5)])
        box = box_envelope(pset, 4)
        assert box.empty

    def test_box_envelope_needs_ball(self):
        with pytest.raises(DomainError):
            box_envelope(PathSet(HybridPath.zero(), [GoodConstraint(2.0)]), 4)

    def test_box_faces_attained_by_members(self):
        # tube-set boxes are tight: explicit members touch both faces
        center = HybridPath.linear(1.0, 1.0)
        radius = 0.1
        pset = tube_set(center, radius, M=3.0, T=100.0)
        n = 8
        box = box_envelope(pset, n)
        eps = 1e-6
        # upper-face member: jump at eps, then track center + radius
        up = HybridPath(
            Track([0.0, eps, 1.0], [0.0, eps + radius, 1.0 + radius], [0.0, eps + radius, 0.0]),
            center.y,
        )
        # lower-face member: max(center - radius, 0), kink at s = radius
        down = HybridPath(Track([0.0, radius, 1.0], [0.0, 0.0, 1.0 - radius]), center.y)
        assert pset.contains(up)
        assert pset.contains(down)
        for j in range(2, n + 1):
            s = j / n
            assert abs(up.x.eval(s) - box.x_hi[j]) <= 1e-9
            assert abs(down.x.eval(s) - box.x_lo[j]) <= 1e-9

    def test_grid_tracking_set_membership(self, rng):
        from fragrect.paths import grid_tracking_set

        center = HybridPath.linear(0.8, 1.2)
        pset = grid_tracking_set(center, 8, M=3.0, T=500.0)
        assert pset.contains(center)


class TestSerialization:
    def test_round_trip_bit_exact(self, rng):
        for _ in range(20):
            p = random_pair(rng)
            buf = io.StringIO()
            path_to_csv(p, buf)
            buf.seek(0)
            q = path_from_csv(buf)
            assert p == q

    def test_malformed_header(self):
        with pytest.raises(DomainError):
            path_from_csv(io.StringIO("bad,header\n"))
