"""Numerical maximization of the growth functional over grid paths.

The search space is the set of continuous paths linear on each grid
cell, encoded by their gridpoint values (equivalently 2n nonnegative
increments), constrained to the M-cone, optionally to a fixed endpoint
or a metric ball, and to K-feasibility: the cumulative profile
Kt(f, 0, s) must stay above -1e-9 at every gridpoint (the extinct
branch of K is a cliff, so it is enforced as a hard reject rather than
a penalty).

The optimizer runs projected coordinate ascent over gridpoint values
from several deterministic starts (diagonal slopes, a coarse lattice
scan for tiny n, a diagonal-prefix construction when its hypotheses
hold, and random feasible paths).  Accepted objective values are
non-decreasing by construction.  A brute-force lattice oracle covers
n <= 2 for acceptance checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import DomainError, InfeasibleError
from .functionals import build_h, rate_K, segment_rate_terms
from .paths import HybridPath, PLGrid

__all__ = [
    "OptProblem",
    "OptResult",
    "optimize",
    "brute_force_oracle",
    "bottleneck_scan",
    "BottleneckReport",
]

PROFILE_TOL = 1e-9


@dataclass(frozen=True)
class OptProblem:
    """Grid-path maximization problem.

    ``endpoint`` pins f(1); ``ball_center``/``ball_radius``/``ball_metric``
    restrict to a metric ball ("sup", "grid", or "levy"); the M-cone
    always applies.
    """

    n: int
    M: float
    endpoint: Optional[Tuple[float, float]] = None
    ball_center: Optional[PLGrid] = None
    ball_radius: Optional[float] = None
    ball_metric: str = "sup"

    def __post_init__(self):
        if not (1 <= self.n <= 64):
            raise DomainError("grid size n must be in [1, 64] for the default budget")
        if not self.M > 1.0:
            raise DomainError("cone bound M must be > 1")
        if (self.ball_center is None) != (self.ball_radius is None):
            raise DomainError("ball constraint needs both center and radius")
        if self.ball_metric not in ("sup", "grid", "levy"):
            raise DomainError(f"unknown ball metric {self.ball_metric!r}")
        if self.endpoint is not None:
            for z in self.endpoint:
                if not (1.0 / self.M - 1e-12 <= z <= self.M + 1e-12):
                    raise DomainError(
                        f"endpoint coordinate {z} incompatible with the M-cone at s=1"
                    )


@dataclass
class OptResult:
    best: PLGrid
    value: float
    profile_s: np.ndarray
    profile_v: np.ndarray
    log: List[Tuple[int, int, float]]  # (start, iteration, accepted value)
    multistarts: int
    feasible: bool


class _GridEval:
    """Incremental objective evaluation for gridpoint value arrays."""

    def __init__(self, problem: OptProblem, vals: np.ndarray):
        self.p = problem
        self.n = problem.n
        self.vals = vals.copy()
        self.seg = np.zeros((self.n, 2))  # (I_j, R*_j) per segment
        for j in range(self.n):
            self._update_segment(j)

    def _update_segment(self, j: int):
        n = self.n
        x0, y0 = self.vals[0, j], self.vals[1, j]
        sx = (self.vals[0, j + 1] - x0) * n
        sy = (self.vals[1, j + 1] - y0) * n
        terms = segment_rate_terms(x0, y0, max(sx, 0.0), max(sy, 0.0), 1.0 / n)
        self.seg[j, 0] = terms[0]
        self.seg[j, 1] = terms[1]

    def set_value(self, c: int, j: int, v: float):
        self.vals[c, j] = v
        if j > 0:
            self._update_segment(j - 1)
        if j < self.n:
            self._update_segment(j)

    def profile(self) -> np.ndarray:
        return np.concatenate(([0.0], np.cumsum(self.seg[:, 1] - self.seg[:, 0])))

    def objective(self) -> Tuple[float, bool]:
        prof = self.profile()
        if not np.all(np.isfinite(prof)):
            return -math.inf, False
        return float(prof[-1]), bool(np.min(prof[1:]) >= -PROFILE_TOL)


def _grid_bounds(problem: OptProblem):
    """Per-gridpoint admissible value boxes from cone + ball (box-like metrics)."""
    n, M = problem.n, problem.M
    s = np.arange(n + 1) / n
    lo = np.vstack((s / M, s / M))
    hi = np.vstack((M * s, M * s))
    if problem.ball_center is not None and problem.ball_metric in ("sup", "grid"):
        c = problem.ball_center.values
        lo = np.maximum(lo, c - problem.ball_radius)
        hi = np.minimum(hi, c + problem.ball_radius)
    lo[:, 0] = 0.0
    hi[:, 0] = 0.0
    if problem.endpoint is not None:
        for c in range(2):
            z = problem.endpoint[c]
            lo[c, n] = hi[c, n] = z
    return lo, hi


def _project(problem: OptProblem, vals: np.ndarray) -> np.ndarray:
    """Project gridpoint values onto nonnegativity, cone, box ball, monotonicity."""
    lo, hi = _grid_bounds(problem)
    out = np.clip(vals, lo, hi)
    out[:, 0] = 0.0
    # forward pass restores monotonicity within the boxes
    for c in range(2):
        for j in range(1, problem.n + 1):
            out[c, j] = min(max(out[c, j], out[c, j - 1], lo[c, j]), hi[c, j])
    return out


def _box_feasible(problem: OptProblem, vals: np.ndarray) -> bool:
    lo, hi = _grid_bounds(problem)
    if np.any(vals < lo - 1e-9) or np.any(vals > hi + 1e-9):
        return False
    if np.any(np.diff(vals, axis=1) < -1e-12):
        return False
    return True


def _levy_ok(problem: OptProblem, vals: np.ndarray) -> bool:
    if problem.ball_center is None or problem.ball_metric != "levy":
        return True
    from .paths import levy_distance

    path = PLGrid(problem.n, vals, validate=False).to_path()
    return levy_distance(path, problem.ball_center.to_path()) <= problem.ball_radius + 1e-12


def _check_geometry(problem: OptProblem):
    lo, hi = _grid_bounds(problem)
    if np.any(lo > hi + 1e-12):
        j = int(np.argmax(np.max(lo - hi, axis=0)))
        raise InfeasibleError(
            "empty feasible region",
            certificate=f"envelope conflict at gridpoint {j}: lower {lo[:, j]} exceeds upper {hi[:, j]}",
        )
    # monotone reachability: running max of lower bounds must stay under hi
    for c in range(2):
        run = 0.0
        for j in range(problem.n + 1):
            run = max(run, lo[c, j])
            if run > hi[c, j] + 1e-12:
                raise InfeasibleError(
                    "empty feasible region",
                    certificate=f"monotonicity conflict at gridpoint {j} (component {'XY'[c]})",
                )


def brute_force_oracle(problem: OptProblem, q: float = 0.25, max_slope: float = 3.0) -> OptResult:
    """Exhaustive argmax over a q-step increment lattice (n <= 2).

    Increments range over (0, max_slope/n] per cell; with an endpoint
    constraint the final increment is the forced residual.  The exact
    lattice argmax is returned; infeasible lattices yield value -inf.
    """
    n = problem.n
    if n > 2:
        raise DomainError("the brute-force oracle supports n <= 2 only")
    _check_geometry(problem)
    max_inc = max_slope / n
    steps = np.arange(q / n, max_inc + 1e-12, q / n)
    if steps.size ** (2 * n) > 1e7:
        raise DomainError("oracle search space exceeds the node budget")

    def candidates_for(c):
        if problem.endpoint is not None:
            z = problem.endpoint[c]
            if n == 1:
                return [(z,)]
            return [(d1, z - d1) for d1 in steps if z - d1 >= 0.0]
        if n == 1:
            return [(d,) for d in steps]
        return [(d1, d2) for d1 in steps for d2 in steps]

    best_val = -math.inf
    best_vals = None
    count = 0
    for incs_x in candidates_for(0):
        vx = np.concatenate(([0.0], np.cumsum(incs_x)))
        for incs_y in candidates_for(1):
            vy = np.concatenate(([0.0], np.cumsum(incs_y)))
            vals = np.vstack((vx, vy))
            count += 1
            if not _box_feasible(problem, vals) or not _levy_ok(problem, vals):
                continue
            ev = _GridEval(problem, vals)
            obj, k_ok = ev.objective()
            if k_ok and obj > best_val:
                best_val = obj
                best_vals = vals.copy()
    if best_vals is None:
        zero = np.zeros((2, n + 1))
        return OptResult(PLGrid(n, zero, validate=False), -math.inf, np.array([]), np.array([]), [], 0, False)
    grid = PLGrid(n, best_vals)
    report = rate_K(grid.to_path())
    return OptResult(grid, report.value, report.profile_s, report.profile_v, [(count, best_val)], 1, True)


def _starts(problem: OptProblem, rng: np.random.Generator):
    """Deterministic multistart list: diagonals, lattice scan, grafts, random."""
    n = problem.n
    starts = []
    for slope in (0.5, 1.0, 1.5, 2.0, 2.5):
        s = np.arange(n + 1) / n
        vals = np.vstack((slope * s, slope * s))
        starts.append(_project(problem, vals))
    if problem.ball_center is not None:
        starts.append(_project(problem, problem.ball_center.values))
    if problem.endpoint is not None:
        s = np.arange(n + 1) / n
        vals = np.vstack((problem.endpoint[0] * s, problem.endpoint[1] * s))
        starts.append(_project(problem, vals))
        # diagonal-prefix graft toward the endpoint ray, when its
        # hypotheses (region membership, tau <= 1/2) admit it
        try:
            target = HybridPath.linear(*problem.endpoint)
            h = build_h(target, n, 1)
            starts.append(_project(problem, h.values))
        except DomainError:
            pass
    if n <= 2:
        try:
            oracle = brute_force_oracle(problem, q=0.25)
            if oracle.feasible:
                starts.append(_project(problem, oracle.best.values))
        except DomainError:
            pass
    for _ in range(4):
        incs = rng.uniform(0.0, 2.0 / n, size=(2, n))
        vals = np.concatenate((np.zeros((2, 1)), np.cumsum(incs, axis=1)), axis=1)
        starts.append(_project(problem, vals))
    return starts


def optimize(problem: OptProblem, seed: int, sweeps: int = 120) -> OptResult:
    """Projected coordinate ascent over gridpoint values.

    Proposes single-gridpoint perturbations over a geometric step
    schedule, projecting onto the admissible box and rejecting
    K-infeasible or Levy-ball-violating moves.  The accepted objective
    sequence is non-decreasing; the reported value is an independent
    re-evaluation of the growth rate on the best path.
    """
    _check_geometry(problem)
    rng = np.random.default_rng(seed)
    n = problem.n
    lo, hi = _grid_bounds(problem)
    log: List[Tuple[int, int, float]] = []
    best_vals = None
    best_obj = -math.inf
    fallback_vals = None
    fallback_minprof = -math.inf
    starts = _starts(problem, rng)

    iteration = 0
    for start_idx, vals in enumerate(starts):
        if not _levy_ok(problem, vals):
            continue
        ev = _GridEval(problem, vals)
        obj, k_ok = ev.objective()
        cur = obj if k_ok else -math.inf
        step = max(problem.M / 4.0, 1.0 / n)
        passes_left = sweeps
        while step > 1e-7 and passes_left > 0:
            passes_left -= 1
            improved = False
            for c in range(2):
                for j in range(1, n + (0 if problem.endpoint is not None else 1)):
                    for direction in (+1.0, -1.0):
                        v_old = ev.vals[c, j]
                        v_new = v_old + direction * step
                        v_new = min(max(v_new, lo[c, j], ev.vals[c, j - 1]), hi[c, j])
                        if j < n:
                            v_new = min(v_new, ev.vals[c, j + 1])
                        if v_new == v_old:
                            continue
                        ev.set_value(c, j, v_new)
                        obj, k_ok = ev.objective()
                        iteration += 1
                        if k_ok and obj > cur and _levy_ok(problem, ev.vals):
                            cur = obj
                            log.append((start_idx, iteration, cur))
                            improved = True
                        else:
                            ev.set_value(c, j, v_old)
            if not improved:
                step *= 0.5
        prof = ev.profile()
        minprof = float(np.min(prof[1:]))
        if minprof > fallback_minprof:
            fallback_minprof = minprof
            fallback_vals = ev.vals.copy()
        if cur > best_obj:
            best_obj = cur
            best_vals = ev.vals.copy()

    if best_vals is None or best_obj == -math.inf:
        # no K-feasible path found: report extinction
        fallback = fallback_vals if fallback_vals is not None else _project(problem, np.zeros((2, n + 1)))
        grid = PLGrid(n, fallback, validate=False)
        report = rate_K(grid.to_path())
        return OptResult(grid, -math.inf, report.profile_s, report.profile_v, log, len(starts), False)

    grid = PLGrid(n, best_vals)
    report = rate_K(grid.to_path())
    return OptResult(grid, report.value, report.profile_s, report.profile_v, log, len(starts), True)


@dataclass
class BottleneckReport:
    classification: str  # "positive-everywhere", "touches-zero", "goes-negative"
    argmin_s: float
    min_value: float
    crossing_s: Optional[float]


def bottleneck_scan(f: HybridPath, grid: int = 1024) -> BottleneckReport:
    """Locate the minimum of the cumulative profile and classify it.

    The profile is sampled on the grid (plus path breakpoints), the
    minimizing cell is refined by ternary search, and a sign crossing
    (if any) is bisected to within 1e-6.
    """
    report = rate_K(f, grid=grid)
    s_vals, prof = report.profile_s, report.profile_v
    interior = s_vals > 0.0
    idx = int(np.argmin(np.where(interior, prof, math.inf)))
    lo = s_vals[max(idx - 1, 0)]
    hi = s_vals[min(idx + 1, len(s_vals) - 1)]
    from .functionals import _PathFunctional

    func = _PathFunctional(f)
    for _ in range(60):
        if hi - lo < 1e-9:
            break
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if func.ktilde(0.0, m1) <= func.ktilde(0.0, m2):
            hi = m2
        else:
            lo = m1
    argmin_s = 0.5 * (lo + hi)
    min_value = func.ktilde(0.0, argmin_s)
    grid_min = float(np.min(prof[interior])) if np.any(interior) else 0.0
    min_value = min(min_value, grid_min)
    if report.classification == "extinct":
        cls = "goes-negative"
    elif report.classification == "positive":
        cls = "positive-everywhere"
    else:
        cls = "touches-zero"
    return BottleneckReport(cls, float(argmin_s), float(min_value), report.bottleneck)
