"""Coupling of the doubled-rate particle with simpler jump processes.

Over a time interval I and a constraint set F, the particle's
per-coordinate jump rates are trapped between the extreme rates over
the box hull of F.  Three processes are built from one jump stream:

  * Z_plus: two independent compound Poisson components with the
    maximal rates (2 R+_X T, 2 R+_Y T) and Exp(T) jump sizes;
  * Z: accepts each Z_plus jump with probability R(live position)/R+,
    reproducing the particle's law while it stays in the set;
  * Z_minus: accepts with the constant ratio R-/R+.

One uniform per jump drives both acceptances, so while Z remains in the
set, every jump of Z_minus is a jump of Z, and every jump of Z is a
jump of Z_plus: the three trajectories are pointwise ordered.

The module also provides the analytic tube bounds for a compound
Poisson process tracking a line, and their Monte Carlo oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import kernels, model
from .errors import DomainError
from .paths import GoodConstraint, HybridPath, PathSet, SupBall

__all__ = [
    "TubeSpec",
    "TubeBounds",
    "tube_bounds",
    "tube_prob_mc",
    "CoupledRun",
    "couple_simulate",
    "simulate_particle_restricted",
    "interval_bounds",
    "run_to_csv",
]


# ---------------------------------------------------------------------------
# analytic tube bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TubeSpec:
    """Parameters of the line-tracking tube event.

    The process is compound Poisson with jump rate R*T and Exp(T) jump
    sizes.  With ``a`` absent the event is
    {|X(s) - A s| < delta for all s <= t}; with ``a`` present it is the
    offset variant {|a + X(s) - A s| < delta for all s <= t,
    |a + X(t) - A t| < delta/2}, which requires a < t*A/2 and
    |a| <= delta/2.
    """

    R: float
    A: float
    delta: float
    t: float
    T: float
    a: Optional[float] = None

    def __post_init__(self):
        if not self.R >= 0.5:
            raise DomainError("tube bounds require rate R >= 1/2")
        if not (self.A > 0 and self.delta > 0 and self.t > 0 and self.T > 0):
            raise DomainError("tube spec needs positive A, delta, t, T")
        if self.a is not None:
            if not self.a < self.t * self.A / 2.0:
                raise DomainError("offset variant requires a < t*A/2")
            if not abs(self.a) <= self.delta / 2.0:
                raise DomainError("offset variant requires |a| <= delta/2")


@dataclass(frozen=True)
class TubeBounds:
    upper: float
    lower: Optional[float]
    threshold: float


def tube_bounds(spec: TubeSpec) -> TubeBounds:
    """Analytic upper/lower bounds on the tube probability.

    The lower bound is only valid (and only reported) when T exceeds
    the stated threshold.  For the offset variant the upper bound is
    the centered bound applied to the widened tube delta + |a|, which
    the offset event implies; with a = 0 this is the exact centered
    bound.
    """
    R, A, d, t, T = spec.R, spec.A, spec.delta, spec.t, spec.T
    drift_cost = t * T * (math.sqrt(R) - math.sqrt(A)) ** 2
    slope_term = abs(1.0 - math.sqrt(R / A))
    if spec.a is None:
        upper = math.exp(-drift_cost + d * slope_term * T)
        threshold = (
            2.0 * A**1.5 * (4.0 * t + d) / (math.sqrt(R) * d**2 * min(A, 1.0) ** 2)
        )
        lower = None
        if T > threshold:
            lower = 0.5 * math.exp(-drift_cost - d * min(A, 1.0) * slope_term * T)
        return TubeBounds(min(upper, 1.0), lower, threshold)
    a = spec.a
    upper = math.exp(-drift_cost + (d + abs(a)) * slope_term * T)
    At = A - a / t
    threshold = (
        2.0 * At**1.5 * (4.0 * t + d) / (math.sqrt(R) * d**2 * min(At, 1.0) ** 2)
    )
    lower = None
    if T > threshold:
        lower = 0.5 * math.exp(
            -drift_cost - d * (1.0 + math.sqrt(R) * (math.sqrt(2.0 * t / d) + 0.5)) * T
        )
    return TubeBounds(min(upper, 1.0), lower, threshold)


def tube_prob_mc(seed: int, spec: TubeSpec, replicas: int, threads: int = 1) -> Tuple[float, float]:
    """Monte Carlo estimate of the tube probability with standard error.

    The tube event is checked exactly: between jumps the gap
    a + X(s) - A s decreases linearly, so its extremes over a segment
    sit at the segment endpoints.  Replica streams are indexed by a
    counter, so splitting them across threads leaves the result
    bit-identical.
    """
    if replicas < 1:
        raise DomainError("need at least one replica")
    a = spec.a if spec.a is not None else 0.0
    endpoint = 1 if spec.a is not None else 0

    def run(rep0: int, count: int) -> int:
        return kernels.tube_mc_batch(
            seed, spec.R, spec.A, spec.delta, spec.t, spec.T, a, count, rep0, endpoint
        )

    if threads <= 1:
        k = run(0, replicas)
    else:
        from concurrent.futures import ThreadPoolExecutor

        chunk = (replicas + threads - 1) // threads
        ranges = [(i, min(chunk, replicas - i)) for i in range(0, replicas, chunk)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            k = sum(pool.map(lambda rc: run(*rc), ranges))
    p = k / replicas
    se = math.sqrt(max(p * (1.0 - p), 0.0) / replicas)
    return p, se


# ---------------------------------------------------------------------------
# the three-process coupling
# ---------------------------------------------------------------------------


def _point_bounds(pset: PathSet, s: float):
    """Coordinate bounds of set members at a single time (cf. box_envelope)."""
    sup_r, grid_r = pset.ball_radii()
    if sup_r is None and grid_r is None:
        raise DomainError("interval bounds need a ball constraint")
    radius = min(r for r in (sup_r, grid_r) if r is not None)
    good = pset.good_constraint()
    lo_env = -math.inf
    hi_env = math.inf
    if good is not None:
        spec = good.spec()
        lo_env = spec.lower(s)
        hi_env = spec.upper(s)
    fx = pset.center.x.eval(s)
    fy = pset.center.y.eval(s)
    if s == 0.0:
        return 0.0, 0.0, 0.0, 0.0
    return (
        max(fx - radius, lo_env, 0.0),
        min(fx + radius, hi_env),
        max(fy - radius, lo_env, 0.0),
        min(fy + radius, hi_env),
    )


def interval_bounds(pset: PathSet, s0: float, s1: float, T: float):
    """Extreme jump rates (R-_X, R+_X, R-_Y, R+_Y) over the interval box."""
    xl0, _, yl0, _ = _point_bounds(pset, s0)
    _, xh1, _, yh1 = _point_bounds(pset, s1)
    rx_plus, ry_minus = model.component_rates(T * xl0, T * yh1)
    rx_minus, ry_plus = model.component_rates(T * xh1, T * yl0)
    return rx_minus, rx_plus, ry_minus, ry_plus


@dataclass
class CoupledRun:
    """Trajectories of the coupled triple over one interval.

    Events are indexed by the jumps of Z_plus.  ``in_set[k]`` reports
    whether the middle process Z had remained inside the constraint set
    through the segment ending at event k; ``exit_s`` is the first time
    the flag turned off (None if never).  ``x_plus_reject_minus`` counts
    jumps of X_plus - X_minus, used by the thinning-independence check.
    """

    s0: float
    s1: float
    start: Tuple[float, float]
    rates: Tuple[float, float, float, float]  # R-_X, R+_X, R-_Y, R+_Y
    event_s: np.ndarray
    x_minus: np.ndarray
    x_mid: np.ndarray
    x_plus: np.ndarray
    y_minus: np.ndarray
    y_mid: np.ndarray
    y_plus: np.ndarray
    in_set: np.ndarray
    exit_s: Optional[float]
    x_plus_reject_minus: int
    y_plus_reject_minus: int

    def final_states(self):
        """(Z-, Z, Z+) at the interval end."""
        return (
            (self.x_minus[-1], self.y_minus[-1]),
            (self.x_mid[-1], self.y_mid[-1]),
            (self.x_plus[-1], self.y_plus[-1]),
        )


def _segment_ok(pset: PathSet, z: Tuple[float, float], sa: float, sb: float) -> bool:
    """Whether a constant position z satisfies the set on [sa, sb].

    Valid for sup-ball and good-envelope constraints with a continuous
    center: extremes over the segment sit at its endpoints.
    """
    x, y = z
    for c in pset.constraints:
        if isinstance(c, SupBall):
            for s in (sa, sb):
                if abs(x - pset.center.x.eval(s)) > c.radius:
                    return False
                if abs(y - pset.center.y.eval(s)) > c.radius:
                    return False
        elif isinstance(c, GoodConstraint):
            spec = c.spec()
            if x < spec.lower(sb) or x > spec.upper(sa):
                return False
            if y < spec.lower(sb) or y > spec.upper(sa):
                return False
        else:
            raise DomainError("coupled runs support sup-ball and good constraints only")
    return True


def couple_simulate(
    seed: int,
    interval: Tuple[float, float],
    pset: PathSet,
    T: float,
    start: Tuple[float, float],
    rep: int = 0,
) -> CoupledRun:
    """Run the coupled triple (Z_minus, Z, Z_plus) over an interval.

    ``start`` must lie in the start box of the set.  Z's acceptance
    ratio always uses its live position, even after leaving the set;
    the in-set flag records when that happened so tests can condition
    afterwards.
    """
    s0, s1 = interval
    if not (0.0 <= s0 < s1 <= 1.0):
        raise DomainError(f"invalid interval {interval}")
    xl, xh, yl, yh = _point_bounds(pset, s0)
    x0, y0 = start
    if not (xl - 1e-12 <= x0 <= xh + 1e-12 and yl - 1e-12 <= y0 <= yh + 1e-12):
        raise DomainError(f"start {start} outside the start box [{xl},{xh}]x[{yl},{yh}]")
    rxm, rxp, rym, ryp = interval_bounds(pset, s0, s1, T)

    base = kernels.stream_base(seed, kernels.TAG_COUPLE, rep)
    k = 0

    def u():
        nonlocal k
        val = kernels.stream_u(base, k)
        k += 1
        return val

    total_rate = 2.0 * (rxp + ryp) * T
    p_x = rxp / (rxp + ryp)

    s = s0
    xm = xmid = xp = x0
    ym = ymid = yp = y0
    event_s = [s0]
    tr_xm, tr_x, tr_xp = [xm], [xmid], [xp]
    tr_ym, tr_y, tr_yp = [ym], [ymid], [yp]
    in_set = [True]
    still_in = _segment_ok(pset, (xmid, ymid), s0, s0)
    exit_s = None if still_in else s0
    x_rej = 0
    y_rej = 0

    while True:
        dwell = -math.log(u()) / total_rate
        s_next = s + dwell
        if s_next > s1:
            if still_in and not _segment_ok(pset, (xmid, ymid), s, s1):
                still_in = False
                exit_s = s
            break
        if still_in and not _segment_ok(pset, (xmid, ymid), s, s_next):
            still_in = False
            exit_s = s
        comp_is_x = u() <= p_x
        size = -math.log(u()) / T
        accept_u = u()
        if comp_is_x:
            xp += size
            if accept_u <= model.component_rates(T * xmid, T * ymid)[0] / rxp:
                xmid += size
            if accept_u <= rxm / rxp:
                xm += size
            else:
                x_rej += 1
        else:
            yp += size
            if accept_u <= model.component_rates(T * xmid, T * ymid)[1] / ryp:
                ymid += size
            if accept_u <= rym / ryp:
                ym += size
            else:
                y_rej += 1
        s = s_next
        event_s.append(s)
        tr_xm.append(xm)
        tr_x.append(xmid)
        tr_xp.append(xp)
        tr_ym.append(ym)
        tr_y.append(ymid)
        tr_yp.append(yp)
        in_set.append(still_in)

    return CoupledRun(
        s0,
        s1,
        start,
        (rxm, rxp, rym, ryp),
        np.array(event_s),
        np.array(tr_xm),
        np.array(tr_x),
        np.array(tr_xp),
        np.array(tr_ym),
        np.array(tr_y),
        np.array(tr_yp),
        np.array(in_set, dtype=bool),
        exit_s,
        x_rej,
        y_rej,
    )


def run_to_csv(run: CoupledRun, fileobj):
    """Export a coupled run as CSV rows (s, X-, X, X+, Y-, Y, Y+, in_set)."""
    fileobj.write("s,X_minus,X,X_plus,Y_minus,Y,Y_plus,in_set\n")
    for k in range(len(run.event_s)):
        fileobj.write(
            f"{float(run.event_s[k])!r},{float(run.x_minus[k])!r},{float(run.x_mid[k])!r},"
            f"{float(run.x_plus[k])!r},{float(run.y_minus[k])!r},{float(run.y_mid[k])!r},"
            f"{float(run.y_plus[k])!r},{int(run.in_set[k])}\n"
        )


def simulate_particle_restricted(
    seed: int,
    interval: Tuple[float, float],
    pset: PathSet,
    T: float,
    start: Tuple[float, float],
    rep: int = 0,
):
    """Direct doubled-rate particle on the interval, stopped on set exit.

    Reference process for the distributional check of the coupling: in
    rescaled time the particle jumps at rate 2 R(T z) T from state z.
    Returns (state at stop, stop time).
    """
    s0, s1 = interval
    base = kernels.stream_base(seed, kernels.TAG_COUPLE ^ 0x5A5A, rep)
    k = 0

    def u():
        nonlocal k
        val = kernels.stream_u(base, k)
        k += 1
        return val

    s = s0
    x, y = start
    while True:
        rate = 2.0 * model.branch_rate(T * x, T * y) * T
        dwell = -math.log(u()) / rate
        s_next = s + dwell
        if s_next > s1:
            if not _segment_ok(pset, (x, y), s, s1):
                return (x, y), s
            return (x, y), s1
        if not _segment_ok(pset, (x, y), s, s_next):
            return (x, y), s
        size = -math.log(u()) / T
        if u() <= model.dir_prob(T * x, T * y):
            x += size
        else:
            y += size
        s = s_next
        if not _segment_ok(pset, (x, y), s, s):
            return (x, y), s
