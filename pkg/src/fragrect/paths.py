"""Two-component monotone cadlag paths and the metrics on them.

A path component (:class:`Track`) is a non-decreasing right-continuous
function on [0, 1] with value 0 at time 0, stored as piecewise-linear
segments plus an explicit jump list.  This covers every object the
toolkit manipulates: grid-piecewise-linear functions, rescaled particle
trajectories (pure jump), and mixtures.

Three metrics are provided: the Levy metric (graph corridor metric,
computed by binary search over a monotone feasibility predicate), the
gridpoint metric (max coordinate distance over an equally spaced grid),
and the uniform metric.  The module also implements the linear-cone
"good" envelopes with and without additive slack, the floor-grid
quantization used to cover good sets with finitely many piecewise
linear functions, and declarative constraint sets with their
per-interval box hulls.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError

__all__ = [
    "Track",
    "HybridPath",
    "PLGrid",
    "GoodSetSpec",
    "GoodCheck",
    "LevyBall",
    "GridBall",
    "SupBall",
    "GoodConstraint",
    "PathSet",
    "BoxEnvelope",
    "tube_set",
    "grid_tracking_set",
    "levy_distance",
    "levy_track_distance",
    "levy_within",
    "levy_track_within",
    "sup_track_distance",
    "grid_distance",
    "sup_distance",
    "is_good",
    "quantize_to_cover",
    "box_envelope",
    "singular_increment",
    "path_to_csv",
    "path_from_csv",
]


class Track:
    """One non-decreasing cadlag coordinate on [0, 1] with value(0) = 0.

    ``times`` are strictly increasing breakpoints starting at 0 and
    ending at 1.  ``values[i]`` is the post-jump value at ``times[i]``
    and ``jumps[i] >= 0`` the jump size there (0 for a continuous
    breakpoint).  Between breakpoints the track is linear from
    ``values[i]`` to ``values[i+1] - jumps[i+1]``.
    """

    __slots__ = ("times", "values", "jumps")

    def __init__(self, times, values, jumps=None, validate: bool = True):
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if jumps is None:
            jumps = np.zeros_like(values)
        else:
            jumps = np.asarray(jumps, dtype=float)
        if times[0] != 0.0:
            times = np.concatenate(([0.0], times))
            values = np.concatenate(([0.0], values))
            jumps = np.concatenate(([0.0], jumps))
        if times[-1] != 1.0:
            times = np.concatenate((times, [1.0]))
            values = np.concatenate((values, [values[-1]]))
            jumps = np.concatenate((jumps, [0.0]))
        if validate:
            if times.shape != values.shape or times.shape != jumps.shape:
                raise DomainError("times, values, jumps must have equal length")
            if np.any(np.diff(times) <= 0):
                raise DomainError("breakpoint times must be strictly increasing")
            if times[0] != 0.0 or times[-1] != 1.0:
                raise DomainError("track must span [0, 1]")
            if values[0] != 0.0:
                raise DomainError("track must start at 0")
            if jumps[0] != 0.0:
                raise DomainError("no jump is representable at time 0")
            if np.any(jumps < 0):
                raise DomainError("jump sizes must be nonnegative")
            left = values - jumps
            if np.any(left[1:] < values[:-1] - 1e-15):
                raise DomainError("track must be non-decreasing")
        # canonicalize so that jump == value - left_value holds exactly in
        # floating point (makes CSV round trips bit-exact)
        jumps = values - (values - jumps)
        self.times = times
        self.values = values
        self.jumps = jumps

    @classmethod
    def zero(cls) -> "Track":
        return cls([0.0, 1.0], [0.0, 0.0])

    @classmethod
    def linear(cls, slope: float) -> "Track":
        return cls([0.0, 1.0], [0.0, slope])

    @classmethod
    def from_pl(cls, times, values) -> "Track":
        """Continuous piecewise-linear track through (times, values)."""
        return cls(times, values)

    @classmethod
    def from_jumps(cls, jump_times, jump_sizes) -> "Track":
        """Pure-jump (step) track: flat except for the listed jumps."""
        jump_times = np.asarray(jump_times, dtype=float)
        jump_sizes = np.asarray(jump_sizes, dtype=float)
        order = np.argsort(jump_times, kind="stable")
        jump_times = jump_times[order]
        jump_sizes = jump_sizes[order]
        if jump_times.size and (jump_times[0] <= 0.0 or jump_times[-1] > 1.0):
            raise DomainError("jump times must lie in (0, 1]")
        times = [0.0]
        values = [0.0]
        jumps = [0.0]
        acc = 0.0
        for t, sz in zip(jump_times, jump_sizes):
            if times[-1] == t:
                # coincident jumps merge
                acc += sz
                values[-1] = acc
                jumps[-1] += sz
            else:
                acc += sz
                times.append(t)
                values.append(acc)
                jumps.append(sz)
        return cls(times, values, jumps)

    def eval(self, s: float) -> float:
        """Right-continuous evaluation with flat extension outside [0, 1]."""
        t, v, j = self.times, self.values, self.jumps
        if s <= 0.0:
            return float(v[0])
        if s >= 1.0:
            return float(v[-1])
        i = bisect_right(t, s) - 1
        if t[i] == s:
            return float(v[i])
        left_end = v[i + 1] - j[i + 1]
        w = (s - t[i]) / (t[i + 1] - t[i])
        return float(v[i] + w * (left_end - v[i]))

    def eval_left(self, s: float) -> float:
        """Left limit, with flat extension (equal to eval at s <= 0)."""
        t, v, j = self.times, self.values, self.jumps
        if s <= 0.0:
            return float(v[0])
        if s > 1.0:
            return float(v[-1])
        i = bisect_left(t, s) - 1  # t[i] < s <= t[i+1]
        left_end = v[i + 1] - j[i + 1]
        if s == t[i + 1]:
            return float(left_end)
        w = (s - t[i]) / (t[i + 1] - t[i])
        return float(v[i] + w * (left_end - v[i]))

    def total_jump(self, a: float, b: float) -> float:
        """Sum of jump sizes in the half-open interval (a, b]."""
        mask = (self.times > a) & (self.times <= b)
        return float(self.jumps[mask].sum())

    def eval_many(self, s: np.ndarray) -> np.ndarray:
        """Vectorized right-continuous evaluation with flat extension."""
        t, v, j = self.times, self.values, self.jumps
        s = np.asarray(s, dtype=float)
        i = np.clip(np.searchsorted(t, s, side="right") - 1, 0, len(t) - 2)
        left_end = v[i + 1] - j[i + 1]
        w = (s - t[i]) / (t[i + 1] - t[i])
        out = v[i] + w * (left_end - v[i])
        at_bp = t[i] == s
        out = np.where(at_bp, v[i], out)
        out = np.where(s <= 0.0, v[0], out)
        out = np.where(s >= 1.0, v[-1], out)
        return out

    def eval_left_many(self, s: np.ndarray) -> np.ndarray:
        """Vectorized left limits with flat extension."""
        t, v, j = self.times, self.values, self.jumps
        s = np.asarray(s, dtype=float)
        i = np.clip(np.searchsorted(t, s, side="left") - 1, 0, len(t) - 2)
        left_end = v[i + 1] - j[i + 1]
        w = (s - t[i]) / (t[i + 1] - t[i])
        out = v[i] + w * (left_end - v[i])
        at_bp = t[i + 1] == s
        out = np.where(at_bp, left_end, out)
        out = np.where(s <= 0.0, v[0], out)
        out = np.where(s > 1.0, v[-1], out)
        return out

    def __eq__(self, other):
        return (
            isinstance(other, Track)
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.values, other.values)
            and np.array_equal(self.jumps, other.jumps)
        )

    def __repr__(self):
        return f"Track({len(self.times)} breakpoints, end={self.values[-1]:.4g})"


class HybridPath:
    """A pair of tracks: a path in E^2."""

    __slots__ = ("x", "y")

    def __init__(self, x: Track, y: Track):
        self.x = x
        self.y = y

    @classmethod
    def zero(cls) -> "HybridPath":
        return cls(Track.zero(), Track.zero())

    @classmethod
    def linear(cls, slope_x: float, slope_y: float) -> "HybridPath":
        return cls(Track.linear(slope_x), Track.linear(slope_y))

    @classmethod
    def from_breakpoints(cls, times, x_values, y_values) -> "HybridPath":
        return cls(Track.from_pl(times, x_values), Track.from_pl(times, y_values))

    def eval(self, s: float) -> Tuple[float, float]:
        if not (0.0 <= s <= 1.0):
            raise DomainError(f"evaluation time {s} outside [0, 1]")
        return self.x.eval(s), self.y.eval(s)

    def track(self, component: str) -> Track:
        if component == "X":
            return self.x
        if component == "Y":
            return self.y
        raise DomainError(f"unknown component {component!r}")

    def __eq__(self, other):
        return isinstance(other, HybridPath) and self.x == other.x and self.y == other.y

    def __repr__(self):
        return f"HybridPath(x={self.x!r}, y={self.y!r})"


class PLGrid:
    """A continuous path linear on each [i/n, (i+1)/n], stored by grid values.

    ``values`` has shape (2, n+1); row 0 is the x component.
    """

    __slots__ = ("n", "values")

    def __init__(self, n: int, values, validate: bool = True):
        values = np.asarray(values, dtype=float)
        if validate:
            if values.shape != (2, n + 1):
                raise DomainError(f"values must have shape (2, {n + 1})")
            if values[0, 0] != 0.0 or values[1, 0] != 0.0:
                raise DomainError("grid path must start at 0")
            if np.any(np.diff(values, axis=1) < -1e-15):
                raise DomainError("grid values must be non-decreasing")
        self.n = n
        self.values = values

    def to_path(self) -> HybridPath:
        t = np.arange(self.n + 1) / self.n
        return HybridPath(Track.from_pl(t, self.values[0]), Track.from_pl(t, self.values[1]))

    def __eq__(self, other):
        return isinstance(other, PLGrid) and self.n == other.n and np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"PLGrid(n={self.n})"


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------


def _sup_diff(p: Track, q: Track, shift: float, lo: float, hi: float) -> float:
    """sup over x in [lo, hi] of p(x) - q(x + shift), flat-extended.

    Both arguments are piecewise linear with jumps, so the difference is
    piecewise linear between the breakpoints of p and the shifted
    breakpoints of q; the sup is attained at a breakpoint or interval
    endpoint, evaluating both one-sided limits.  Each track's one-sided
    values are taken exactly at its own breakpoints: recomputing
    (t - shift) + shift can cross a jump time by one ulp and lose the
    jump entirely.
    """
    best = -math.inf
    for x in (lo, hi):
        best = max(
            best,
            p.eval(x) - q.eval(x + shift),
            p.eval_left(x) - q.eval_left(x + shift),
        )
    mask = (p.times >= lo) & (p.times <= hi)
    if np.any(mask):
        xs = p.times[mask]
        best = max(best, float(np.max(p.values[mask] - q.eval_many(xs + shift))))
        left_p = p.values[mask] - p.jumps[mask]
        best = max(best, float(np.max(left_p - q.eval_left_many(xs + shift))))
    xq = q.times - shift
    mq = (xq >= lo) & (xq <= hi)
    if np.any(mq):
        best = max(best, float(np.max(p.eval_many(xq[mq]) - q.values[mq])))
        left_q = q.values[mq] - q.jumps[mq]
        best = max(best, float(np.max(p.eval_left_many(xq[mq]) - left_q)))
    return best


def _check_track_in_e(f: Track):
    # Track invariants already guarantee E-membership; kept for clarity
    # at the metric API boundary.
    if f.values[0] != 0.0:
        raise DomainError("track not in E: value at 0 must be 0")


def levy_track_distance(f: Track, g: Track, tol: float = 1e-12) -> float:
    """Levy (corridor) distance between two monotone tracks.

    d(f, g) = inf{r > 0 : f(x-r) - r < g(x) < f(x+r) + r for all
    x in [-r, 1+r]}, with flat extension outside [0, 1].  Feasibility in
    r is monotone for non-decreasing tracks, so binary search converges;
    the feasibility predicate is evaluated exactly at the breakpoints of
    both tracks.
    """
    _check_track_in_e(f)
    _check_track_in_e(g)
    feasible = lambda r: _levy_track_feasible(f, g, r)
    hi = sup_track_distance(f, g)
    if hi == 0.0:
        return 0.0
    hi = hi * (1.0 + 1e-12) + 1e-15
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def sup_track_distance(f: Track, g: Track) -> float:
    """Exact uniform distance between two tracks."""
    a = _sup_diff(f, g, 0.0, 0.0, 1.0)
    b = _sup_diff(g, f, 0.0, 0.0, 1.0)
    return max(a, b, 0.0)


def _levy_track_feasible(f: Track, g: Track, r: float) -> bool:
    if _sup_diff(g, f, r, -r, 1.0 + r) > r:
        return False
    if _sup_diff(f, g, r, -2.0 * r, 1.0) > r:
        return False
    return True


def levy_track_within(f: Track, g: Track, r: float, tol: float = 1e-12) -> bool:
    """Closed-ball test d(f, g) <= r without computing the distance.

    A single feasibility evaluation at radius r (with tolerance
    cushion); much cheaper than binary search when only a threshold
    comparison is needed.
    """
    return _levy_track_feasible(f, g, r * (1.0 + 1e-12) + tol)


def levy_within(f: HybridPath, g: HybridPath, r: float, tol: float = 1e-12) -> bool:
    """Closed-ball test for the product metric on path pairs."""
    return levy_track_within(f.x, g.x, r, tol) and levy_track_within(f.y, g.y, r, tol)


def levy_distance(f: HybridPath, g: HybridPath, tol: float = 1e-12) -> float:
    """Product Levy metric on E^2: max of the two track distances."""
    return max(levy_track_distance(f.x, g.x, tol), levy_track_distance(f.y, g.y, tol))


def sup_distance(f: HybridPath, g: HybridPath) -> float:
    """rho(f, g) = sup_s max(|f_X - g_X|, |f_Y - g_Y|)."""
    return max(sup_track_distance(f.x, g.x), sup_track_distance(f.y, g.y))


def grid_distance(f: HybridPath, g: HybridPath, n: int) -> float:
    """Max coordinate distance over the gridpoints i/n, i = 0..n."""
    if n < 1:
        raise DomainError("grid size must be >= 1")
    best = 0.0
    for i in range(n + 1):
        s = i / n
        best = max(
            best,
            abs(f.x.eval(s) - g.x.eval(s)),
            abs(f.y.eval(s) - g.y.eval(s)),
        )
    return best


def singular_increment(track: Track, a: float, b: float) -> float:
    """Sum of the track's jump sizes in (a, b] (its singular part)."""
    if not (0.0 <= a <= b <= 1.0):
        raise DomainError(f"invalid interval ({a}, {b})")
    return track.total_jump(a, b)


# ---------------------------------------------------------------------------
# good sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GoodSetSpec:
    """Linear-cone envelope: s/M <= f(s) <= M s, optionally with slack.

    With ``T`` present the envelope is widened additively:
    s/M - 2 T^{-2/3} <= f(s) <= M (s + 2 T^{-2/3}).
    """

    M: float
    T: Optional[float] = None

    def __post_init__(self):
        if not self.M > 1.0:
            raise DomainError("good-set bound M must be > 1")
        if self.T is not None and not self.T > 1.0:
            raise DomainError("good-set scale T must be > 1")

    @property
    def slack(self) -> float:
        return 0.0 if self.T is None else 2.0 * self.T ** (-2.0 / 3.0)

    def lower(self, s: float) -> float:
        return s / self.M - self.slack

    def upper(self, s: float) -> float:
        return self.M * (s + self.slack)


@dataclass(frozen=True)
class GoodCheck:
    ok: bool
    witness: Optional[float] = None
    component: Optional[str] = None
    margin: float = math.inf


def _track_good_margin(track: Track, spec: GoodSetSpec):
    """Minimum envelope margin over the track; negative means violation.

    The track is piecewise linear between breakpoints and both envelope
    faces are linear in s, so extremes occur at breakpoint one-sided
    values.
    """
    t, v, j = track.times, track.values, track.jumps
    lo = t / spec.M - spec.slack
    hi = spec.M * (t + spec.slack)
    margins = np.minimum(v - lo, hi - v)
    left = v - j
    left_margins = np.where(j > 0, np.minimum(left - lo, hi - left), math.inf)
    all_m = np.minimum(margins, left_margins)
    i = int(np.argmin(all_m))
    return float(all_m[i]), float(t[i])


def is_good(path: HybridPath, spec: GoodSetSpec, tol: float = 1e-12) -> GoodCheck:
    """Membership of both tracks in the good envelope, with a witness on failure."""
    mx, wx = _track_good_margin(path.x, spec)
    my, wy = _track_good_margin(path.y, spec)
    if mx <= my:
        worst, witness, comp = mx, wx, "X"
    else:
        worst, witness, comp = my, wy, "Y"
    if worst >= -tol:
        return GoodCheck(True, None, None, worst)
    return GoodCheck(False, witness, comp, worst)


def quantize_to_cover(h: HybridPath, n: int) -> PLGrid:
    """Floor-quantized grid interpolant: g(j/n) = floor(n^2 h(j/n)) / n^2.

    When h lies in a slackened good set with n >= 4M and
    T >= (4 M n)^{3/2}, the output satisfies grid distance < 1/n^2 from
    h, Levy distance <= 1/n, and lies in the 4M cone.
    """
    n2 = float(n * n)
    vals = np.empty((2, n + 1))
    for c, track in enumerate((h.x, h.y)):
        for i in range(n + 1):
            vals[c, i] = math.floor(n2 * track.eval(i / n)) / n2
    return PLGrid(n, vals)


# ---------------------------------------------------------------------------
# constraint sets and box envelopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LevyBall:
    radius: float


@dataclass(frozen=True)
class GridBall:
    n: int
    radius: float


@dataclass(frozen=True)
class SupBall:
    radius: float


@dataclass(frozen=True)
class GoodConstraint:
    M: float
    T: Optional[float] = None

    def spec(self) -> GoodSetSpec:
        return GoodSetSpec(self.M, self.T)


class PathSet:
    """Declarative intersection of balls around a center and good envelopes."""

    def __init__(self, center: HybridPath, constraints: Sequence):
        for c in constraints:
            if isinstance(c, (LevyBall, GridBall, SupBall)) and not c.radius > 0:
                raise DomainError("ball radii must be positive")
        self.center = center
        self.constraints = tuple(constraints)

    def contains(self, path: HybridPath, levy_tol: float = 1e-12) -> bool:
        """Closed-ball membership of a full path (1e-12 floating cushion)."""
        for c in self.constraints:
            if isinstance(c, SupBall):
                if sup_distance(path, self.center) > c.radius * (1.0 + 1e-12) + 1e-15:
                    return False
            elif isinstance(c, GridBall):
                if grid_distance(path, self.center, c.n) > c.radius * (1.0 + 1e-12) + 1e-15:
                    return False
            elif isinstance(c, LevyBall):
                if not levy_within(path, self.center, c.radius, levy_tol):
                    return False
            elif isinstance(c, GoodConstraint):
                if not is_good(path, c.spec()).ok:
                    return False
            else:
                raise DomainError(f"unknown constraint {c!r}")
        return True

    def good_constraint(self) -> Optional[GoodConstraint]:
        for c in self.constraints:
            if isinstance(c, GoodConstraint):
                return c
        return None

    def ball_radii(self):
        sup_r = None
        grid_r = None
        for c in self.constraints:
            if isinstance(c, SupBall):
                sup_r = c.radius if sup_r is None else min(sup_r, c.radius)
            elif isinstance(c, GridBall):
                grid_r = c.radius if grid_r is None else min(grid_r, c.radius)
        return sup_r, grid_r


def tube_set(center: HybridPath, radius: float, M: float = None, T: float = None) -> PathSet:
    """Uniform-metric tube around a center, intersected with a good set if M given."""
    cons = [SupBall(radius)]
    if M is not None:
        cons.append(GoodConstraint(M, T))
    return PathSet(center, cons)


def grid_tracking_set(center: HybridPath, n: int, M: float, T: float) -> PathSet:
    """Gridpoint ball of radius 1/n^2, Levy ball of radius 1/n, good envelope."""
    return PathSet(center, [GridBall(n, 1.0 / n**2), LevyBall(1.0 / n), GoodConstraint(M, T)])


@dataclass
class BoxEnvelope:
    """Per-gridpoint coordinate bounds for a PathSet.

    ``x_lo[i]`` etc. bound the coordinate values of set members at time
    i/n.  ``interval_box(j)`` returns the hull of member values over
    [j/n, (j+1)/n], which by monotonicity is
    [x_lo[j], x_hi[j+1]] x [y_lo[j], y_hi[j+1]].
    """

    n: int
    x_lo: np.ndarray
    x_hi: np.ndarray
    y_lo: np.ndarray
    y_hi: np.ndarray
    empty: bool

    def interval_box(self, j: int):
        if not (0 <= j < self.n):
            raise DomainError(f"interval index {j} out of range")
        return (
            float(self.x_lo[j]),
            float(self.x_hi[j + 1]),
            float(self.y_lo[j]),
            float(self.y_hi[j + 1]),
        )


def box_envelope(pset: PathSet, n: int) -> BoxEnvelope:
    """Per-gridpoint box hull of a constraint set.

    For tube-type sets (uniform ball) the box is exact: center +- radius
    clipped to the good envelope and to nonnegativity.  For
    gridpoint-ball sets the gridpoint values are exact and the hull in
    between relies on monotonicity only, so the box is a certified
    superset (the Levy-ball constraint is deliberately not projected).
    Every member passes through 0 at time 0, so the box at gridpoint 0
    is degenerate.
    """
    sup_r, grid_r = pset.ball_radii()
    if sup_r is None and grid_r is None:
        raise DomainError("box envelope needs at least one sup or grid ball constraint")
    radius = min(r for r in (sup_r, grid_r) if r is not None)
    good = pset.good_constraint()
    spec = good.spec() if good is not None else None

    s_grid = np.arange(n + 1) / n
    x_lo = np.empty(n + 1)
    x_hi = np.empty(n + 1)
    y_lo = np.empty(n + 1)
    y_hi = np.empty(n + 1)
    for i, s in enumerate(s_grid):
        fx = pset.center.x.eval(s)
        fy = pset.center.y.eval(s)
        lo_env = spec.lower(s) if spec is not None else -math.inf
        hi_env = spec.upper(s) if spec is not None else math.inf
        x_lo[i] = max(fx - radius, lo_env, 0.0)
        x_hi[i] = min(fx + radius, hi_env)
        y_lo[i] = max(fy - radius, lo_env, 0.0)
        y_hi[i] = min(fy + radius, hi_env)
    # every member starts at the origin
    x_lo[0] = x_hi[0] = 0.0
    y_lo[0] = y_hi[0] = 0.0
    empty = bool(np.any(x_lo > x_hi + 1e-15) or np.any(y_lo > y_hi + 1e-15))
    return BoxEnvelope(n, x_lo, x_hi, y_lo, y_hi, empty)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def path_to_csv(path: HybridPath, fileobj):
    """Write a path as CSV rows (component, time, value, is_jump).

    A jump at time t is written as two rows: the pre-jump value with
    is_jump=0 followed by the post-jump value with is_jump=1.  Floats
    are written with shortest round-trip repr, so the round trip is
    bit-exact.
    """
    fileobj.write("component,time,value,is_jump\n")
    for name, track in (("X", path.x), ("Y", path.y)):
        for i in range(len(track.times)):
            t = float(track.times[i])
            v = float(track.values[i])
            j = float(track.jumps[i])
            if j > 0.0:
                fileobj.write(f"{name},{t!r},{(v - j)!r},0\n")
                fileobj.write(f"{name},{t!r},{v!r},1\n")
            else:
                fileobj.write(f"{name},{t!r},{v!r},0\n")


def path_from_csv(fileobj) -> HybridPath:
    """Inverse of :func:`path_to_csv`."""
    header = fileobj.readline().strip()
    if header != "component,time,value,is_jump":
        raise DomainError(f"unexpected CSV header {header!r}")
    rows = {"X": [], "Y": []}
    for lineno, line in enumerate(fileobj, start=2):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 4 or parts[0] not in rows:
            raise DomainError(f"malformed path CSV at line {lineno}: {line!r}")
        rows[parts[0]].append((float(parts[1]), float(parts[2]), int(parts[3])))
    tracks = {}
    for name, entries in rows.items():
        times = []
        values = []
        jumps = []
        i = 0
        while i < len(entries):
            t, v, isj = entries[i]
            if isj:
                raise DomainError(f"jump row without preceding pre-jump value at t={t}")
            if i + 1 < len(entries) and entries[i + 1][2] == 1 and entries[i + 1][0] == t:
                post = entries[i + 1][1]
                times.append(t)
                values.append(post)
                jumps.append(post - v)
                i += 2
            else:
                times.append(t)
                values.append(v)
                jumps.append(0.0)
                i += 1
        tracks[name] = Track(times, values, jumps)
    return HybridPath(tracks["X"], tracks["Y"])
