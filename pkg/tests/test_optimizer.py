import math

import numpy as np
import pytest

from fragrect import functionals as F
from fragrect.errors import DomainError, InfeasibleError
from fragrect.optimizer import (
    BottleneckReport,
    OptProblem,
    bottleneck_scan,
    brute_force_oracle,
    optimize,
)
from fragrect.paths import HybridPath, PLGrid, Track

SQRT2 = math.sqrt(2.0)


class TestProblemValidation:
    def test_n_bounds(self):
        with pytest.raises(DomainError):
            OptProblem(n=0, M=3.0)
        with pytest.raises(DomainError):
            OptProblem(n=100, M=3.0)

    def test_endpoint_outside_cone(self):
        with pytest.raises(DomainError):
            OptProblem(n=4, M=3.0, endpoint=(5.0, 5.0))

    def test_infeasible_geometry_certificate(self):
        center = PLGrid(2, np.array([[0.0, 2.0, 4.0], [0.0, 2.0, 4.0]]))
        problem = OptProblem(
            n=2, M=1.5, ball_center=center, ball_radius=0.05, ball_metric="sup"
        )
        with pytest.raises(InfeasibleError) as exc:
            optimize(problem, seed=1)
        assert exc.value.certificate


class TestOracle:
    def test_linear_argmax_location(self):
        # exhaustive scan over straight paths: the best lattice slope
        # pair sits near (1.1, 2.0) mirrored; value about 1.316
        res = brute_force_oracle(OptProblem(n=1, M=3.0), q=0.1)
        vals = res.best.values
        slopes = sorted((vals[0, 1], vals[1, 1]))
        assert slopes[0] == pytest.approx(1.1, abs=0.1 + 1e-9)
        assert slopes[1] == pytest.approx(2.0, abs=0.1 + 1e-9)
        assert res.value == pytest.approx(1.3161, abs=2e-3)

    def test_unconstrained_beats_diagonal(self):
        res = brute_force_oracle(OptProblem(n=1, M=3.0), q=0.1)
        assert res.value > F.kappa(1.0, 1.0)

    def test_endpoint_forces_value(self):
        res = brute_force_oracle(OptProblem(n=1, M=3.0, endpoint=(0.5, 0.5)), q=0.1)
        assert res.value == pytest.approx(2.0 * SQRT2 - 2.0, abs=1e-9)

    def test_rejects_large_n(self):
        with pytest.raises(DomainError):
            brute_force_oracle(OptProblem(n=4, M=3.0))

    def test_infeasible_lattice_reported(self):
        # endpoint forcing slope 10 in a tight cone: every profile dives
        res = brute_force_oracle(OptProblem(n=2, M=10.0, endpoint=(10.0, 10.0)), q=0.5)
        assert res.value == -math.inf
        assert not res.feasible


class TestOptimize:
    def test_dominates_oracle(self):
        for n, q in ((1, 0.1), (2, 0.5)):
            problem = OptProblem(n=n, M=3.0)
            oracle = brute_force_oracle(problem, q=q)
            result = optimize(problem, seed=11)
            assert result.value >= oracle.value - 1e-6

    def test_endpoint_lower_bound(self):
        # the straight path to the endpoint is feasible, so the result
        # is at least its growth rate
        problem = OptProblem(n=2, M=3.0, endpoint=(0.5, 0.5))
        result = optimize(problem, seed=3)
        assert result.value >= 2.0 * SQRT2 - 2.0 - 1e-9

    def test_extinct_endpoint_reports_infeasible(self):
        problem = OptProblem(n=2, M=10.0, endpoint=(10.0, 10.0))
        result = optimize(problem, seed=3)
        assert result.value == -math.inf
        assert not result.feasible

    def test_monotone_accepted_objective_per_start(self):
        result = optimize(OptProblem(n=4, M=3.0), seed=5)
        by_start = {}
        for start, _, val in result.log:
            by_start.setdefault(start, []).append(val)
        assert by_start
        for vals in by_start.values():
            assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_reported_value_is_independent_reevaluation(self):
        result = optimize(OptProblem(n=4, M=3.0), seed=7)
        recomputed = F.rate_K(result.best.to_path()).value
        assert result.value == pytest.approx(recomputed, abs=1e-9)

    def test_deterministic_given_seed(self):
        a = optimize(OptProblem(n=2, M=3.0), seed=9)
        b = optimize(OptProblem(n=2, M=3.0), seed=9)
        assert a.value == b.value
        assert np.array_equal(a.best.values, b.best.values)

    def test_sup_ball_constraint_respected(self):
        s = np.arange(3) / 2.0
        center = PLGrid(2, np.vstack((s, s)))
        problem = OptProblem(n=2, M=3.0, ball_center=center, ball_radius=0.1)
        result = optimize(problem, seed=13)
        diff = np.abs(result.best.values - center.values)
        assert np.max(diff) <= 0.1 + 1e-9


class TestBottleneckScan:
    def test_positive_diagonal(self):
        rep = bottleneck_scan(HybridPath.linear(1, 1))
        assert rep.classification == "positive-everywhere"
        # the profile is s: its infimum over (0, 1] approaches 0 at 0+
        assert rep.min_value >= -1e-9
        assert rep.argmin_s <= 0.01

    def test_fast_diagonal_goes_negative(self):
        rep = bottleneck_scan(HybridPath.linear(10, 10))
        assert rep.classification == "goes-negative"
        assert rep.crossing_s is not None and rep.crossing_s <= 1e-6

    def test_kinked_path_crossing_location(self):
        tx = Track([0.0, 0.5, 1.0], [0.0, 0.5, 5.5])
        f = HybridPath(tx, Track([0.0, 0.5, 1.0], [0.0, 0.5, 5.5]))
        rep = bottleneck_scan(f)
        assert rep.classification == "goes-negative"
        expect = 0.5 + 0.5 / (21.0 - 4.0 * math.sqrt(10.0))
        assert rep.crossing_s == pytest.approx(expect, abs=1e-5)

    def test_touching_zero(self):
        lam = 1.5 + SQRT2
        rep = bottleneck_scan(HybridPath.linear(lam, lam))
        assert rep.classification == "touches-zero"
