"""Event-exact simulation of the fragmentation branching system.

The process is realized as a marked binary tree: every vertex carries
two uniforms (split fraction, split direction) and an Exp(1) lifetime
factor, all derived from a counter-based hash of (seed, vertex
bit-path).  The same seed therefore regenerates identical trees
regardless of expansion order, and disjoint subtrees can be expanded
independently.

A vertex v with position (X_v, Y_v) lives for e_v / R(X_v, Y_v) time
units and is then replaced by two children; with probability
P(X_v, Y_v) the children displace in x by -log(U) and -log(1-U), else
in y.  Alive sets, ancestral (rescaled) paths, constraint-set counting,
the doubled-rate single-particle process used for expectation
estimates, and the fixed-lineage discrete walk are all built on top of
the materialized arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from . import kernels, model
from .errors import DomainError, ResourceCapError
from .paths import (
    GoodConstraint,
    HybridPath,
    PathSet,
    SupBall,
    Track,
    tube_set,
)

__all__ = [
    "MarkedTree",
    "AliveSet",
    "SpineState",
    "expand_tree",
    "alive_at",
    "rescaled_path",
    "count_in_set",
    "count_partial",
    "spine_simulate",
    "many_to_one_estimate",
    "direct_population_mean",
    "diagonal_census",
    "discrete_moments",
    "MomentReport",
    "tree_snapshot_rows",
    "fragmentation_frame",
]

DEFAULT_CAP = 10_000_000


@dataclass
class MarkedTree:
    """Materialized portion of the infinite marked binary tree."""

    seed: int
    key: np.ndarray
    parent: np.ndarray
    depth: np.ndarray
    x: np.ndarray
    y: np.ndarray
    tb: np.ndarray
    life: np.ndarray
    t_horizon: Optional[float]
    gen_horizon: Optional[int]
    pruned: bool
    truncated: bool = False

    def __len__(self):
        return len(self.key)

    @property
    def death(self) -> np.ndarray:
        return self.tb + self.life

    def lineage(self, v: int) -> np.ndarray:
        """Vertex indices from the root down to v (inclusive)."""
        out = []
        i = int(v)
        while i >= 0:
            out.append(i)
            i = int(self.parent[i])
        return np.array(out[::-1], dtype=np.int64)

    def address(self, v: int) -> str:
        """Human-readable bit-path address: root "r", children append 1/2.

        Children are appended consecutively, so the first of a sibling
        pair is the one whose predecessor has a different parent.
        """
        lin = self.lineage(v)
        out = ["r"]
        for b in lin[1:]:
            b = int(b)
            first = b > 0 and self.parent[b - 1] != self.parent[b]
            out.append("1" if first else "2")
        return "".join(out)


@dataclass
class AliveSet:
    """Particles alive at a query time, with positions and lineage handles."""

    t: float
    indices: np.ndarray
    x: np.ndarray
    y: np.ndarray
    tb: np.ndarray

    def __len__(self):
        return len(self.indices)


def _prune_kernel_args(prune_set: Optional[PathSet], prune_T: Optional[float]) -> Dict:
    if prune_set is None:
        return dict(
            prune_ts=None,
            prune_fx=None,
            prune_fy=None,
            prune_radius=float("inf"),
            prune_T=1.0,
            good_M=0.0,
            good_slack=0.0,
        )
    if prune_T is None:
        raise DomainError("pruned expansion needs the rescaling horizon prune_T")
    radius = float("inf")
    good_M = 0.0
    good_slack = 0.0
    for c in prune_set.constraints:
        if isinstance(c, SupBall):
            radius = min(radius, c.radius)
        elif isinstance(c, GoodConstraint):
            good_M = c.M
            good_slack = c.spec().slack
        else:
            raise DomainError(
                "pruned expansion supports uniform-ball and good-envelope constraints only"
            )
    center = prune_set.center
    if np.any(center.x.jumps > 0) or np.any(center.y.jumps > 0):
        raise DomainError("pruned expansion needs a continuous center path")
    times = np.unique(np.concatenate((center.x.times, center.y.times)))
    fx = np.array([center.x.eval(t) for t in times])
    fy = np.array([center.y.eval(t) for t in times])
    return dict(
        prune_ts=times,
        prune_fx=fx,
        prune_fy=fy,
        prune_radius=radius,
        prune_T=float(prune_T),
        good_M=good_M,
        good_slack=good_slack,
    )


def expand_tree(
    seed: int,
    t: Optional[float] = None,
    generations: Optional[int] = None,
    cap: int = DEFAULT_CAP,
    prune_set: Optional[PathSet] = None,
    prune_T: Optional[float] = None,
    marks: Optional[Dict[str, Tuple[float, float, float]]] = None,
    on_cap: str = "raise",
) -> MarkedTree:
    """Materialize all vertices born up to a time or generation horizon.

    Exactly one of ``t`` and ``generations`` must be given.  The
    expansion is validated up front against the cap using the e^t
    growth heuristic (branching rate >= 1), except when a pruning set
    restricts the population.  ``marks`` injects per-vertex
    (u_split, u_dir, e) triples by address ("r", "r1", "r12", ...) for
    deterministic tests; unlisted vertices fall back to the hash chain.

    ``on_cap`` selects the overflow behavior: "raise" (default) raises
    ResourceCapError with partial-state diagnostics; "truncate" returns
    the partial tree flagged ``truncated`` (any count taken on it is a
    lower bound for the full-tree count).
    """
    if on_cap not in ("raise", "truncate"):
        raise DomainError(f"unknown on_cap mode {on_cap!r}")
    if (t is None) == (generations is None):
        raise DomainError("specify exactly one of t or generations")
    if t is not None and t < 0:
        raise DomainError("time horizon must be nonnegative")
    if generations is not None and generations < 0:
        raise DomainError("generation horizon must be nonnegative")
    if prune_set is None:
        if t is not None and t > math.log(2.0 * cap):
            raise ResourceCapError(
                f"expected population e^{t:.1f} exceeds cap {cap}", 0, 0.0
            )
        if generations is not None and 2 ** (generations + 1) - 1 > 2 * cap:
            raise ResourceCapError(
                f"full tree to generation {generations} exceeds cap {cap}", 0, 0.0
            )

    if marks is not None:
        return _expand_with_marks(seed, t, generations, cap, marks)

    args = _prune_kernel_args(prune_set, prune_T)
    status, arrays = kernels.expand_tree(
        seed,
        t_max=-1.0 if t is None else float(t),
        gen_max=-1 if generations is None else int(generations),
        cap=cap,
        **args,
    )
    tree = MarkedTree(
        seed=seed,
        key=arrays["key"],
        parent=arrays["parent"],
        depth=arrays["depth"],
        x=arrays["x"],
        y=arrays["y"],
        tb=arrays["tb"],
        life=arrays["life"],
        t_horizon=t,
        gen_horizon=generations,
        pruned=prune_set is not None,
        truncated=status != 0,
    )
    if status != 0 and on_cap == "raise":
        raise ResourceCapError(
            f"particle cap {cap} exceeded after {len(tree)} vertices "
            f"(last birth at t={tree.tb[-1]:.4f})",
            len(tree),
            float(tree.tb[-1]),
        )
    return tree


def _expand_with_marks(seed, t, generations, cap, marks) -> MarkedTree:
    """Slow generic expansion with injectable marks (tests only)."""

    def get_marks(address: str, key: int):
        if address in marks:
            return marks[address]
        return kernels.vertex_marks(key)

    keys = [kernels.root_key(seed)]
    addrs = ["r"]
    parent = [-1]
    depth = [0]
    xs = [0.0]
    ys = [0.0]
    tb = [0.0]
    _, _, e0 = get_marks("r", keys[0])
    life = [e0 / model.branch_rate(0.0, 0.0)]
    i = 0
    while i < len(keys):
        death = tb[i] + life[i]
        expand = death <= t if t is not None else depth[i] < generations
        if expand:
            if len(keys) + 2 > cap:
                raise ResourceCapError("particle cap exceeded", len(keys), tb[-1])
            us, ud, _ = get_marks(addrs[i], keys[i])
            d = 1 if ud <= model.dir_prob(xs[i], ys[i]) else 0
            for which, de in ((0, -math.log(us)), (1, -math.log1p(-us))):
                ck = kernels.child_key(keys[i], which)
                ca = addrs[i] + ("1" if which == 0 else "2")
                cx = xs[i] + de if d == 1 else xs[i]
                cy = ys[i] if d == 1 else ys[i] + de
                _, _, ce = get_marks(ca, ck)
                keys.append(ck)
                addrs.append(ca)
                parent.append(i)
                depth.append(depth[i] + 1)
                xs.append(cx)
                ys.append(cy)
                tb.append(death)
                life.append(ce / model.branch_rate(cx, cy))
        i += 1
    return MarkedTree(
        seed=seed,
        key=np.array(keys, dtype=np.uint64),
        parent=np.array(parent, dtype=np.int64),
        depth=np.array(depth, dtype=np.int32),
        x=np.array(xs),
        y=np.array(ys),
        tb=np.array(tb),
        life=np.array(life),
        t_horizon=t,
        gen_horizon=generations,
        pruned=False,
    )


def alive_at(tree: MarkedTree, t: float) -> AliveSet:
    """Exact membership: v alive iff T_v <= t < T_v + lifetime."""
    if tree.t_horizon is not None and t > tree.t_horizon:
        raise DomainError(f"query time {t} beyond expanded horizon {tree.t_horizon}")
    mask = (tree.tb <= t) & (t < tree.death)
    idx = np.nonzero(mask)[0]
    return AliveSet(t, idx, tree.x[idx], tree.y[idx], tree.tb[idx])


def _lineage_path(tree: MarkedTree, v: int, T: float) -> HybridPath:
    lin = tree.lineage(v)
    jump_t = tree.tb[lin[1:]] / T
    dx = np.diff(tree.x[lin]) / T
    dy = np.diff(tree.y[lin]) / T
    x_mask = dx > 0
    tx = Track.from_jumps(jump_t[x_mask], dx[x_mask])
    ty = Track.from_jumps(jump_t[~x_mask], dy[~x_mask])
    return HybridPath(tx, ty)


def rescaled_path(tree: MarkedTree, v: int, T: float) -> HybridPath:
    """T-rescaled ancestral trajectory of a particle alive at time T."""
    if not (tree.tb[v] <= T < tree.death[v]):
        raise DomainError(f"vertex {v} is not alive at time {T}")
    return _lineage_path(tree, v, T)


def _fast_tube_countable(pset: PathSet) -> bool:
    if any(not isinstance(c, (SupBall, GoodConstraint)) for c in pset.constraints):
        return False
    return not (np.any(pset.center.x.jumps > 0) or np.any(pset.center.y.jumps > 0))


def _count_fast(tree: MarkedTree, T: float, pset: PathSet) -> int:
    """Vectorized counting for uniform-tube (+good) sets with continuous centers.

    Each vertex occupies a constant position on [T_v, min(death, T)];
    the center and envelopes are continuous and monotone, so per-vertex
    interval-endpoint checks are exact.  A particle counts iff every
    ancestor segment (and its own final segment) passes.
    """
    death = np.minimum(tree.death, T)
    live = tree.tb <= T
    s0 = np.where(live, tree.tb, 0.0) / T
    s1 = np.where(live, death, 0.0) / T
    rx = tree.x / T
    ry = tree.y / T

    ok = np.ones(len(tree), dtype=bool)
    center = pset.center
    for c in pset.constraints:
        if isinstance(c, SupBall):
            for s in (s0, s1):
                fx = np.interp(s, center.x.times, center.x.values)
                fy = np.interp(s, center.y.times, center.y.values)
                ok &= np.abs(rx - fx) <= c.radius
                ok &= np.abs(ry - fy) <= c.radius
        else:
            spec = c.spec()
            lo1 = s1 / spec.M - spec.slack
            hi0 = spec.M * (s0 + spec.slack)
            ok &= (rx >= lo1) & (rx <= hi0) & (ry >= lo1) & (ry <= hi0)
    ok &= live

    # propagate along ancestries (parents precede children in array order)
    parent = tree.parent
    for i in range(1, len(tree)):
        p = parent[i]
        if p >= 0 and not ok[p]:
            # a vertex only counts if every ancestor segment passed; an
            # ancestor that failed its own segment check poisons the
            # whole subtree unless the failure was only its final
            # overhang beyond T (impossible here since s1 is clipped)
            ok[i] = False
    alive_mask = (tree.tb <= T) & (T < tree.death)
    return int(np.count_nonzero(ok & alive_mask))


def count_in_set(tree: MarkedTree, T: float, pset: PathSet, method: str = "auto") -> int:
    """Number of particles alive at T whose full rescaled paths lie in the set."""
    if tree.t_horizon is not None and T > tree.t_horizon:
        raise DomainError(f"count time {T} beyond expanded horizon")
    if method == "auto":
        method = "fast" if _fast_tube_countable(pset) else "generic"
    if method == "fast":
        if not _fast_tube_countable(pset):
            raise DomainError("fast counting requires a continuous-center tube set")
        return _count_fast(tree, T, pset)
    count = 0
    for v in alive_at(tree, T).indices:
        if pset.contains(rescaled_path(tree, int(v), T)):
            count += 1
    return count


def count_partial(tree: MarkedTree, T: float, pset: PathSet, theta: float) -> int:
    """Particles alive at theta*T whose rescaled paths stay in the set on [0, theta].

    Constraints are checked on the restriction: uniform balls over
    [0, theta], grid balls at gridpoints <= theta, envelopes on
    [0, theta].
    """
    if not (0.0 < theta <= 1.0):
        raise DomainError("theta must lie in (0, 1]")
    t_query = theta * T
    if tree.t_horizon is not None and t_query > tree.t_horizon:
        raise DomainError("partial count beyond expanded horizon")
    sub = tube_restriction(pset, theta)
    count = 0
    for v in alive_at(tree, t_query).indices:
        path = _restricted_path(tree, int(v), T, theta)
        if sub(path):
            count += 1
    return count


def _restricted_path(tree: MarkedTree, v: int, T: float, theta: float) -> HybridPath:
    return _lineage_path(tree, v, T)


def tube_restriction(pset: PathSet, theta: float) -> Callable[[HybridPath], bool]:
    """Membership predicate for the restriction of a constraint set to [0, theta]."""
    from .paths import GridBall, LevyBall, grid_distance, is_good, levy_distance, sup_distance

    def check(path: HybridPath) -> bool:
        for c in pset.constraints:
            if isinstance(c, SupBall):
                if _sup_distance_upto(path, pset.center, theta) > c.radius:
                    return False
            elif isinstance(c, GridBall):
                for i in range(int(math.floor(theta * c.n)) + 1):
                    s = i / c.n
                    if (
                        abs(path.x.eval(s) - pset.center.x.eval(s)) > c.radius
                        or abs(path.y.eval(s) - pset.center.y.eval(s)) > c.radius
                    ):
                        return False
            elif isinstance(c, GoodConstraint):
                spec = c.spec()
                for track in (path.x, path.y):
                    for i, s in enumerate(track.times):
                        if s > theta:
                            break
                        v = track.values[i]
                        if v < spec.lower(s) - 1e-12 or v > spec.upper(s) + 1e-12:
                            return False
                    v = track.eval(theta)
                    if v < spec.lower(theta) - 1e-12 or v > spec.upper(theta) + 1e-12:
                        return False
            elif isinstance(c, LevyBall):
                # conservative necessary condition on the restriction
                if _sup_distance_upto(path, pset.center, max(theta - c.radius, 0.0)) > 2 * c.radius:
                    return False
        return True

    return check


def _sup_distance_upto(f: HybridPath, g: HybridPath, theta: float) -> float:
    best = 0.0
    for tf, tg in ((f.x, g.x), (f.y, g.y)):
        cands = {0.0, theta}
        for t in np.concatenate((tf.times, tg.times)):
            if 0.0 < t < theta:
                cands.add(float(t))
        for s in cands:
            best = max(best, abs(tf.eval(s) - tg.eval(s)), abs(tf.eval_left(s) - tg.eval_left(s)))
    return best


# ---------------------------------------------------------------------------
# the doubled-rate single-particle process
# ---------------------------------------------------------------------------


@dataclass
class SpineState:
    """Terminal state of one doubled-rate particle trajectory."""

    t: float
    x: float
    y: float
    int_r: float
    jump_s: np.ndarray
    jump_dx: np.ndarray
    jump_dy: np.ndarray

    @property
    def weight(self) -> float:
        return math.exp(self.int_r)

    def rescaled_path(self, T: Optional[float] = None) -> HybridPath:
        """Trajectory rescaled by T (defaults to the simulation horizon)."""
        T = self.t if T is None else T
        s = self.jump_s / T
        keep = s <= 1.0
        xm = keep & (self.jump_dx > 0)
        ym = keep & (self.jump_dy > 0)
        tx = Track.from_jumps(s[xm], self.jump_dx[xm] / T)
        ty = Track.from_jumps(s[ym], self.jump_dy[ym] / T)
        return HybridPath(tx, ty)


def spine_simulate(seed: int, t: float, rep: int = 0) -> SpineState:
    """Exact event-driven simulation of the rate-2R single particle.

    Between jumps the rate is constant, so the integral of R along the
    trajectory accumulates in closed form.
    """
    if t < 0:
        raise DomainError("time must be nonnegative")
    times, dxs, dys, int_r = kernels.spine_path(seed, rep, t)
    x = float(dxs.sum())
    y = float(dys.sum())
    return SpineState(t, x, y, int_r, times, dxs, dys)


def many_to_one_estimate(
    seed: int,
    t: float,
    replicas: int,
    indicator: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None,
    threads: int = 1,
) -> Tuple[float, float]:
    """Monte Carlo estimate of E[sum over particles of f(position at t)].

    Averages f(xi_t) e^{int R} over doubled-rate trajectories; the
    indicator defaults to 1 (population size).  Returns (estimate,
    standard error).  Replica streams are counter-indexed, so a
    multi-threaded run returns bit-identical values.
    """
    if replicas < 1:
        raise DomainError("need at least one replica")
    if threads <= 1:
        x, y, int_r = kernels.spine_batch(seed, t, replicas)
    else:
        from concurrent.futures import ThreadPoolExecutor

        chunk = (replicas + threads - 1) // threads
        ranges = [(i, min(chunk, replicas - i)) for i in range(0, replicas, chunk)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda rc: kernels.spine_batch(seed, t, rc[1], rc[0]), ranges))
        x = np.concatenate([p[0] for p in parts])
        y = np.concatenate([p[1] for p in parts])
        int_r = np.concatenate([p[2] for p in parts])
    w = np.exp(int_r)
    if indicator is not None:
        w = w * indicator(x, y)
    est = float(np.mean(w))
    se = float(np.std(w, ddof=1) / math.sqrt(replicas)) if replicas > 1 else 0.0
    return est, se


def direct_population_mean(seed: int, t: float, n_trees: int, cap: int = DEFAULT_CAP):
    """Mean population size at t over independent trees, with standard error."""
    counts = np.empty(n_trees)
    for k in range(n_trees):
        tree = expand_tree(kernels.mix2(seed, k), t=t, cap=cap)
        counts[k] = len(alive_at(tree, t))
    return float(counts.mean()), float(counts.std(ddof=1) / math.sqrt(n_trees)), counts


def diagonal_census(seed: int, n_trees: int, n: int, T: float, cap: int = DEFAULT_CAP):
    """Count particles staying within the diagonal tube, per tree.

    The tube is |Z(s) - (s/2, s/2)| <= T/(2 n^2) for all
    s <= ceil(n^{7/8}) T / n, checked exactly on the piecewise-constant
    trajectories.
    """
    t_star = math.ceil(n ** (7.0 / 8.0)) * T / n
    radius = (T / (2.0 * n * n)) / t_star
    center = HybridPath.linear(0.5, 0.5)
    pset = tube_set(center, radius)
    counts = np.empty(n_trees, dtype=np.int64)
    for k in range(n_trees):
        tree = expand_tree(
            kernels.mix2(seed, k), t=t_star, cap=cap, prune_set=pset, prune_T=t_star
        )
        counts[k] = count_in_set(tree, t_star, pset)
    return counts


@dataclass
class MomentReport:
    """Empirical moments of the fixed-lineage discrete walk."""

    j: int
    replicas: int
    delta2: float
    delta2_se: float
    delta4: float
    delta4_se: float
    delta6: float
    delta6_se: float
    ssum6: float
    ssum6_se: float


def discrete_moments(seed: int, j: int, replicas: int) -> MomentReport:
    """Moments of Delta_j = X_j - Y_j and S_j = X_j + Y_j - j along a fixed lineage."""
    if j < 0 or replicas < 1:
        raise DomainError("need j >= 0 and replicas >= 1")
    delta, ssum = kernels.moments_walk_batch(seed, j, replicas)

    def stat(v):
        return float(v.mean()), float(v.std(ddof=1) / math.sqrt(replicas)) if replicas > 1 else 0.0

    d2, d2se = stat(delta**2)
    d4, d4se = stat(delta**4)
    d6, d6se = stat(delta**6)
    s6, s6se = stat(ssum**6)
    return MomentReport(j, replicas, d2, d2se, d4, d4se, d6, d6se, s6, s6se)


# ---------------------------------------------------------------------------
# exports
# ---------------------------------------------------------------------------


def tree_snapshot_rows(tree: MarkedTree):
    """Rows (vertex_id, B, H, X, Y, T_birth, T_death) for CSV export."""
    addrs = _addresses(tree)
    death = tree.death
    for i in range(len(tree)):
        yield (
            addrs[i],
            math.exp(-tree.x[i]),
            math.exp(-tree.y[i]),
            float(tree.x[i]),
            float(tree.y[i]),
            float(tree.tb[i]),
            float(death[i]),
        )


def _addresses(tree: MarkedTree):
    addrs = [""] * len(tree)
    addrs[0] = "r"
    last_parent = -2
    for i in range(1, len(tree)):
        p = int(tree.parent[i])
        which = "1" if p != last_parent else "2"
        addrs[i] = addrs[p] + which
        last_parent = p
    return addrs


def fragmentation_frame(tree: MarkedTree, t: float):
    """Geometry of the alive rectangles at time t.

    Children produced by a vertical split are placed left (the U piece)
    then right inside the parent; horizontal splits place the U piece at
    the bottom.  This is a rendering convention; the process itself only
    prescribes sizes.  Yields rows (vertex_id, x0, y0, base, height).
    """
    n = len(tree)
    x0 = np.zeros(n)
    y0 = np.zeros(n)
    last_parent = -2
    for i in range(1, n):
        p = int(tree.parent[i])
        if p == last_parent:
            # second child: offset by the first child's extent
            first = i - 1
            if tree.x[i] > tree.x[p]:  # vertical split (x moved)
                x0[i] = x0[p] + math.exp(-tree.x[first])
                y0[i] = y0[p]
            else:
                x0[i] = x0[p]
                y0[i] = y0[p] + math.exp(-tree.y[first])
        else:
            x0[i] = x0[p]
            y0[i] = y0[p]
        last_parent = p
    addrs = _addresses(tree)
    for v in alive_at(tree, t).indices:
        v = int(v)
        yield (
            addrs[v],
            float(x0[v]),
            float(y0[v]),
            math.exp(-tree.x[v]),
            math.exp(-tree.y[v]),
        )
