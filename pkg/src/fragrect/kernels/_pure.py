"""Pure-Python reference kernels.

Bit-for-bit equivalent to the Cython lane in ``_ckernels.pyx``: both
lanes derive every random variate from the same counter-based generator
(a splitmix64-style finalizer over (seed, stream tag, counter) or over
per-vertex hash-chain keys), so a given seed produces identical output
regardless of which lane is active.

The tree kernel materializes vertices in breadth-first array order;
per-vertex marks depend only on (seed, vertex bit-path), never on the
traversal, which is what makes regeneration and subtree parallelism
reproducible.
"""

from __future__ import annotations

import math

import numpy as np

M64 = (1 << 64) - 1
GOLD = 0x9E3779B97F4A7C15
MULT2 = 0xC2B2AE3D27D4EB4F

# stream tags (arbitrary distinct u64 constants)
TAG_TREE = 0x7472656500000001
TAG_SPINE = 0x7370696E00000002
TAG_TUBE = 0x7475626500000003
TAG_MOMENTS = 0x6D6F6D0000000004
TAG_COUPLE = 0x63706C0000000005

# child-branch xor constants for the vertex key chain
CHILD0 = 0xD1B54A32D192ED03
CHILD1 = 0x8CB92BA72F3D8DD7

# mark-slot xor constants
SLOT_SPLIT = 0xA0761D6478BD642F
SLOT_DIR = 0xE7037ED1A0B428DB
SLOT_EXP = 0x589965CC75374CC3


def smix(z: int) -> int:
    """splitmix64 finalizer; a bijection on 64-bit words."""
    z &= M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return z ^ (z >> 31)


def mix2(a: int, b: int) -> int:
    """Mix two 64-bit words into one."""
    return smix(((a & M64) * GOLD ^ (b & M64) * MULT2) & M64)


def unit53(u: int) -> float:
    """Map a 64-bit word to a double in the open interval (0, 1)."""
    return ((u >> 11) + 0.5) * (2.0 ** -53)


def root_key(seed: int) -> int:
    return mix2(seed, TAG_TREE)


def child_key(key: int, which: int) -> int:
    """Key of child 1 (which=0) or child 2 (which=1)."""
    return smix(key ^ (CHILD0 if which == 0 else CHILD1))


def vertex_marks(key: int):
    """Per-vertex randomness (u_split, u_dir, e): two uniforms and an Exp(1)."""
    us = unit53(smix(key ^ SLOT_SPLIT))
    ud = unit53(smix(key ^ SLOT_DIR))
    e = -math.log(unit53(smix(key ^ SLOT_EXP)))
    return us, ud, e


def stream_base(seed: int, tag: int, rep: int) -> int:
    return mix2(mix2(seed, tag), rep)


def stream_u(base: int, k: int) -> float:
    return unit53(smix(base ^ ((k * GOLD) & M64)))


def _branch_rate(x: float, y: float) -> float:
    a = x + 1.0
    b = y + 1.0
    return a / b if a >= b else b / a


def _dir_prob(x: float, y: float) -> float:
    a = x + 1.0
    b = y + 1.0
    if x >= y:
        return b / (2.0 * a)
    return 1.0 - a / (2.0 * b)


def _interp(ts, vs, s: float) -> float:
    """Piecewise-linear interpolation with flat extension, scalar."""
    n = len(ts)
    if s <= ts[0]:
        return vs[0]
    if s >= ts[n - 1]:
        return vs[n - 1]
    lo, hi = 0, n - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ts[mid] <= s:
            lo = mid
        else:
            hi = mid
    w = (s - ts[lo]) / (ts[hi] - ts[lo])
    return vs[lo] + w * (vs[hi] - vs[lo])


def expand_tree(
    seed: int,
    t_max: float = -1.0,
    gen_max: int = -1,
    cap: int = 10_000_000,
    prune_ts=None,
    prune_fx=None,
    prune_fy=None,
    prune_radius: float = float("inf"),
    prune_T: float = 1.0,
    good_M: float = 0.0,
    good_slack: float = 0.0,
):
    """Materialize the marked binary tree up to a time or generation horizon.

    Exactly one of ``t_max`` (>= 0) or ``gen_max`` (>= 0) must be set.
    When pruning is active (finite ``prune_radius`` or ``good_M`` > 0), a
    vertex's children are skipped if the vertex's constant-position
    segment already violates the tube/envelope, which cannot affect any
    path that stays inside the constraint set.

    Returns (status, arrays) where status is 0 on success, 1 on cap
    overflow, and arrays is a dict of numpy arrays (key, parent, depth,
    x, y, tb, life).
    """
    time_mode = t_max >= 0.0
    prune_ball = math.isfinite(prune_radius)
    prune_good = good_M > 0.0
    pruning = prune_ball or prune_good

    keys = [root_key(seed)]
    parent = [-1]
    depth = [0]
    _, _, e0 = vertex_marks(keys[0])
    xs = [0.0]
    ys = [0.0]
    tb = [0.0]
    life = [e0 / _branch_rate(0.0, 0.0)]

    status = 0
    i = 0
    while i < len(keys):
        death = tb[i] + life[i]
        if time_mode:
            expand = death <= t_max
        else:
            expand = depth[i] < gen_max
        if expand and pruning:
            x, y = xs[i], ys[i]
            s0 = tb[i] / prune_T
            s1 = (min(death, t_max) if time_mode else death) / prune_T
            ok = True
            if prune_ball:
                rx = x / prune_T
                ry = y / prune_T
                for s in (s0, s1):
                    if abs(rx - _interp(prune_ts, prune_fx, s)) > prune_radius:
                        ok = False
                        break
                    if abs(ry - _interp(prune_ts, prune_fy, s)) > prune_radius:
                        ok = False
                        break
            if ok and prune_good:
                rx = x / prune_T
                ry = y / prune_T
                if rx < s1 / good_M - good_slack or ry < s1 / good_M - good_slack:
                    ok = False
                elif rx > good_M * (s0 + good_slack) or ry > good_M * (s0 + good_slack):
                    ok = False
            expand = ok
        if expand:
            if len(keys) + 2 > cap:
                status = 1
                break
            us, ud, _ = vertex_marks(keys[i])
            x, y = xs[i], ys[i]
            d = 1 if ud <= _dir_prob(x, y) else 0
            e1 = -math.log(us)
            e2 = -math.log1p(-us)
            for which, de in ((0, e1), (1, e2)):
                ck = child_key(keys[i], which)
                if d == 1:
                    cx, cy = x + de, y
                else:
                    cx, cy = x, y + de
                _, _, ce = vertex_marks(ck)
                keys.append(ck)
                parent.append(i)
                depth.append(depth[i] + 1)
                xs.append(cx)
                ys.append(cy)
                tb.append(death)
                life.append(ce / _branch_rate(cx, cy))
        i += 1

    arrays = {
        "key": np.array(keys, dtype=np.uint64),
        "parent": np.array(parent, dtype=np.int64),
        "depth": np.array(depth, dtype=np.int32),
        "x": np.array(xs, dtype=np.float64),
        "y": np.array(ys, dtype=np.float64),
        "tb": np.array(tb, dtype=np.float64),
        "life": np.array(life, dtype=np.float64),
    }
    return status, arrays


def spine_batch(seed: int, t: float, n_reps: int, rep0: int = 0):
    """Simulate ``n_reps`` spine trajectories to time ``t``.

    The spine jumps at rate 2R(z); each jump adds an Exp(1) to the x
    coordinate with probability P(z), else to the y coordinate.  Returns
    numpy arrays (x_final, y_final, int_R) where int_R is the exact
    integral of R along the trajectory.
    """
    out_x = np.empty(n_reps)
    out_y = np.empty(n_reps)
    out_ir = np.empty(n_reps)
    for r in range(n_reps):
        base = stream_base(seed, TAG_SPINE, rep0 + r)
        x = y = 0.0
        s = 0.0
        ir = 0.0
        k = 0
        while True:
            rate = _branch_rate(x, y)
            dwell = -math.log(stream_u(base, k)) / (2.0 * rate)
            k += 1
            if s + dwell >= t:
                ir += rate * (t - s)
                break
            s += dwell
            ir += rate * dwell
            ud = stream_u(base, k)
            k += 1
            e = -math.log(stream_u(base, k))
            k += 1
            if ud <= _dir_prob(x, y):
                x += e
            else:
                y += e
        out_x[r] = x
        out_y[r] = y
        out_ir[r] = ir
    return out_x, out_y, out_ir


def spine_path(seed: int, rep: int, t: float):
    """One spine trajectory with its full jump log.

    Returns (times, dx, dy, int_R): jump times and per-jump displacement
    arrays, plus the exact integral of R up to ``t``.
    """
    base = stream_base(seed, TAG_SPINE, rep)
    x = y = 0.0
    s = 0.0
    ir = 0.0
    k = 0
    times = []
    dxs = []
    dys = []
    while True:
        rate = _branch_rate(x, y)
        dwell = -math.log(stream_u(base, k)) / (2.0 * rate)
        k += 1
        if s + dwell >= t:
            ir += rate * (t - s)
            break
        s += dwell
        ir += rate * dwell
        ud = stream_u(base, k)
        k += 1
        e = -math.log(stream_u(base, k))
        k += 1
        if ud <= _dir_prob(x, y):
            x += e
            times.append(s)
            dxs.append(e)
            dys.append(0.0)
        else:
            y += e
            times.append(s)
            dxs.append(0.0)
            dys.append(e)
    return (
        np.array(times, dtype=np.float64),
        np.array(dxs, dtype=np.float64),
        np.array(dys, dtype=np.float64),
        ir,
    )


def tube_mc_batch(
    seed: int,
    R: float,
    A: float,
    delta: float,
    t: float,
    T: float,
    a: float,
    n_reps: int,
    rep0: int = 0,
    endpoint: int = 1,
) -> int:
    """Count compound-Poisson paths that stay in the tube.

    The process X has jump rate R*T and Exp(T) jump sizes.  A replica
    succeeds if |a + X(s) - A s| < delta for all s <= t and, when
    ``endpoint`` is set, |a + X(t) - A t| < delta/2.  The gap
    a + X(s) - A s decreases linearly between jumps, so checking just
    before each jump, just after each jump, and at t is exact.
    """
    successes = 0
    rate = R * T
    for r in range(n_reps):
        base = stream_base(seed, TAG_TUBE, rep0 + r)
        gap = a
        s = 0.0
        k = 0
        ok = True
        while True:
            dwell = -math.log(stream_u(base, k)) / rate
            k += 1
            if s + dwell >= t:
                gap_end = gap - A * (t - s)
                ok = abs(gap_end) < delta / 2.0 if endpoint else gap_end > -delta
                break
            gap -= A * dwell
            if gap <= -delta:
                ok = False
                break
            size = -math.log(stream_u(base, k)) / T
            k += 1
            gap += size
            if gap >= delta:
                ok = False
                break
            s += dwell
        if ok:
            successes += 1
    return successes


def moments_walk_batch(seed: int, j: int, n_reps: int, rep0: int = 0):
    """Discrete-time walk along a fixed spine for ``j`` generations.

    Returns arrays (delta, ssum) with delta = X_j - Y_j and
    ssum = X_j + Y_j - j for each replica.
    """
    out_d = np.empty(n_reps)
    out_s = np.empty(n_reps)
    for r in range(n_reps):
        base = stream_base(seed, TAG_MOMENTS, rep0 + r)
        x = y = 0.0
        for step in range(j):
            ud = stream_u(base, 2 * step)
            e = -math.log(stream_u(base, 2 * step + 1))
            if ud <= _dir_prob(x, y):
                x += e
            else:
                y += e
        out_d[r] = x - y
        out_s[r] = x + y - j
    return out_d, out_s
