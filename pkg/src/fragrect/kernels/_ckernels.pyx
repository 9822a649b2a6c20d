# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: bit-for-bit identical to kernels._pure.

Every random variate is a pure function of (seed, stream tag, counter)
or of the per-vertex key chain, mixed by the splitmix64 finalizer, so
this lane and the pure lane produce identical output for a given seed.
"""

from libc.math cimport log, log1p, fabs

import numpy as np

ctypedef unsigned long long u64

cdef u64 GOLD = 0x9E3779B97F4A7C15ULL
cdef u64 MULT2 = 0xC2B2AE3D27D4EB4FULL

cdef u64 TAG_TREE = 0x7472656500000001ULL
cdef u64 TAG_SPINE = 0x7370696E00000002ULL
cdef u64 TAG_TUBE = 0x7475626500000003ULL
cdef u64 TAG_MOMENTS = 0x6D6F6D0000000004ULL

cdef u64 CHILD0 = 0xD1B54A32D192ED03ULL
cdef u64 CHILD1 = 0x8CB92BA72F3D8DD7ULL

cdef u64 SLOT_SPLIT = 0xA0761D6478BD642FULL
cdef u64 SLOT_DIR = 0xE7037ED1A0B428DBULL
cdef u64 SLOT_EXP = 0x589965CC75374CC3ULL

cdef double U53 = 1.0 / 9007199254740992.0  # 2^-53


cdef inline u64 c_smix(u64 z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline u64 c_mix2(u64 a, u64 b) nogil:
    return c_smix(a * GOLD ^ b * MULT2)


cdef inline double c_unit53(u64 u) nogil:
    return (<double>(u >> 11) + 0.5) * U53


cdef inline double c_stream_u(u64 base, u64 k) nogil:
    return c_unit53(c_smix(base ^ (k * GOLD)))


cdef inline double c_branch_rate(double x, double y) nogil:
    cdef double a = x + 1.0
    cdef double b = y + 1.0
    return a / b if a >= b else b / a


cdef inline double c_dir_prob(double x, double y) nogil:
    cdef double a = x + 1.0
    cdef double b = y + 1.0
    if x >= y:
        return b / (2.0 * a)
    return 1.0 - a / (2.0 * b)


cdef inline double c_interp(double[:] ts, double[:] vs, double s) nogil:
    cdef Py_ssize_t n = ts.shape[0]
    cdef Py_ssize_t lo, hi, mid
    cdef double w
    if s <= ts[0]:
        return vs[0]
    if s >= ts[n - 1]:
        return vs[n - 1]
    lo = 0
    hi = n - 1
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if ts[mid] <= s:
            lo = mid
        else:
            hi = mid
    w = (s - ts[lo]) / (ts[hi] - ts[lo])
    return vs[lo] + w * (vs[hi] - vs[lo])


def expand_tree(
    seed,
    double t_max=-1.0,
    long long gen_max=-1,
    long long cap=10_000_000,
    prune_ts=None,
    prune_fx=None,
    prune_fy=None,
    double prune_radius=float("inf"),
    double prune_T=1.0,
    double good_M=0.0,
    double good_slack=0.0,
):
    """Materialize the marked tree; see kernels._pure.expand_tree."""
    cdef bint time_mode = t_max >= 0.0
    cdef bint prune_ball = prune_radius == prune_radius and prune_radius != float("inf")
    cdef bint prune_good = good_M > 0.0
    cdef bint pruning = prune_ball or prune_good

    cdef double[:] p_ts
    cdef double[:] p_fx
    cdef double[:] p_fy
    if pruning and prune_ts is not None:
        p_ts = np.ascontiguousarray(prune_ts, dtype=np.float64)
        p_fx = np.ascontiguousarray(prune_fx, dtype=np.float64)
        p_fy = np.ascontiguousarray(prune_fy, dtype=np.float64)
    else:
        p_ts = np.zeros(1)
        p_fx = np.zeros(1)
        p_fy = np.zeros(1)
        prune_ball = False

    cdef Py_ssize_t capacity = 1024
    keys_a = np.empty(capacity, dtype=np.uint64)
    parent_a = np.empty(capacity, dtype=np.int64)
    depth_a = np.empty(capacity, dtype=np.int32)
    xs_a = np.empty(capacity, dtype=np.float64)
    ys_a = np.empty(capacity, dtype=np.float64)
    tb_a = np.empty(capacity, dtype=np.float64)
    life_a = np.empty(capacity, dtype=np.float64)
    cdef u64[:] keys = keys_a
    cdef long long[:] parent = parent_a
    cdef int[:] depth = depth_a
    cdef double[:] xs = xs_a
    cdef double[:] ys = ys_a
    cdef double[:] tb = tb_a
    cdef double[:] life = life_a

    cdef u64 rk = c_mix2(<u64>(int(seed) & 0xFFFFFFFFFFFFFFFF), TAG_TREE)
    keys[0] = rk
    parent[0] = -1
    depth[0] = 0
    xs[0] = 0.0
    ys[0] = 0.0
    tb[0] = 0.0
    life[0] = -log(c_unit53(c_smix(rk ^ SLOT_EXP))) / c_branch_rate(0.0, 0.0)

    cdef Py_ssize_t size = 1
    cdef Py_ssize_t i = 0
    cdef int status = 0
    cdef double death, us, ud, x, y, s0, s1, rx, ry, de, cx, cy, ce
    cdef bint expand, ok
    cdef int which, d
    cdef u64 ck

    while i < size:
        death = tb[i] + life[i]
        if time_mode:
            expand = death <= t_max
        else:
            expand = depth[i] < gen_max
        if expand and pruning:
            x = xs[i]
            y = ys[i]
            s0 = tb[i] / prune_T
            s1 = (min(death, t_max) if time_mode else death) / prune_T
            ok = True
            if prune_ball:
                rx = x / prune_T
                ry = y / prune_T
                if fabs(rx - c_interp(p_ts, p_fx, s0)) > prune_radius:
                    ok = False
                elif fabs(rx - c_interp(p_ts, p_fx, s1)) > prune_radius:
                    ok = False
                elif fabs(ry - c_interp(p_ts, p_fy, s0)) > prune_radius:
                    ok = False
                elif fabs(ry - c_interp(p_ts, p_fy, s1)) > prune_radius:
                    ok = False
            if ok and prune_good:
                rx = x / prune_T
                ry = y / prune_T
                if rx < s1 / good_M - good_slack or ry < s1 / good_M - good_slack:
                    ok = False
                elif rx > good_M * (s0 + good_slack) or ry > good_M * (s0 + good_slack):
                    ok = False
            expand = ok
        if expand:
            if size + 2 > cap:
                status = 1
                break
            if size + 2 > capacity:
                capacity *= 2
                keys_a = np.resize(keys_a, capacity)
                parent_a = np.resize(parent_a, capacity)
                depth_a = np.resize(depth_a, capacity)
                xs_a = np.resize(xs_a, capacity)
                ys_a = np.resize(ys_a, capacity)
                tb_a = np.resize(tb_a, capacity)
                life_a = np.resize(life_a, capacity)
                keys = keys_a
                parent = parent_a
                depth = depth_a
                xs = xs_a
                ys = ys_a
                tb = tb_a
                life = life_a
            us = c_unit53(c_smix(keys[i] ^ SLOT_SPLIT))
            ud = c_unit53(c_smix(keys[i] ^ SLOT_DIR))
            x = xs[i]
            y = ys[i]
            d = 1 if ud <= c_dir_prob(x, y) else 0
            for which in range(2):
                de = -log(us) if which == 0 else -log1p(-us)
                ck = c_smix(keys[i] ^ (CHILD0 if which == 0 else CHILD1))
                if d == 1:
                    cx = x + de
                    cy = y
                else:
                    cx = x
                    cy = y + de
                ce = -log(c_unit53(c_smix(ck ^ SLOT_EXP)))
                keys[size] = ck
                parent[size] = i
                depth[size] = depth[i] + 1
                xs[size] = cx
                ys[size] = cy
                tb[size] = death
                life[size] = ce / c_branch_rate(cx, cy)
                size += 1
        i += 1

    arrays = {
        "key": keys_a[:size].copy(),
        "parent": parent_a[:size].copy(),
        "depth": depth_a[:size].copy(),
        "x": xs_a[:size].copy(),
        "y": ys_a[:size].copy(),
        "tb": tb_a[:size].copy(),
        "life": life_a[:size].copy(),
    }
    return status, arrays


def spine_batch(seed, double t, long long n_reps, long long rep0=0):
    """Batch of doubled-rate trajectories; see kernels._pure.spine_batch."""
    out_x = np.empty(n_reps)
    out_y = np.empty(n_reps)
    out_ir = np.empty(n_reps)
    cdef double[:] ox = out_x
    cdef double[:] oy = out_y
    cdef double[:] oir = out_ir
    cdef u64 seed_u = <u64>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef u64 base
    cdef long long r
    cdef u64 k
    cdef double x, y, s, ir, rate, dwell, ud, e
    with nogil:
        for r in range(n_reps):
            base = c_mix2(c_mix2(seed_u, TAG_SPINE), <u64>(rep0 + r))
            x = 0.0
            y = 0.0
            s = 0.0
            ir = 0.0
            k = 0
            while True:
                rate = c_branch_rate(x, y)
                dwell = -log(c_stream_u(base, k)) / (2.0 * rate)
                k += 1
                if s + dwell >= t:
                    ir += rate * (t - s)
                    break
                s += dwell
                ir += rate * dwell
                ud = c_stream_u(base, k)
                k += 1
                e = -log(c_stream_u(base, k))
                k += 1
                if ud <= c_dir_prob(x, y):
                    x += e
                else:
                    y += e
            ox[r] = x
            oy[r] = y
            oir[r] = ir
    return out_x, out_y, out_ir


def spine_path(seed, rep, double t):
    """One doubled-rate trajectory with its jump log."""
    cdef u64 seed_u = <u64>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef u64 base = c_mix2(c_mix2(seed_u, TAG_SPINE), <u64>(int(rep)))
    cdef Py_ssize_t capacity = 256
    times_a = np.empty(capacity)
    dxs_a = np.empty(capacity)
    dys_a = np.empty(capacity)
    cdef double[:] times = times_a
    cdef double[:] dxs = dxs_a
    cdef double[:] dys = dys_a
    cdef Py_ssize_t size = 0
    cdef u64 k = 0
    cdef double x = 0.0, y = 0.0, s = 0.0, ir = 0.0
    cdef double rate, dwell, ud, e
    while True:
        rate = c_branch_rate(x, y)
        dwell = -log(c_stream_u(base, k)) / (2.0 * rate)
        k += 1
        if s + dwell >= t:
            ir += rate * (t - s)
            break
        s += dwell
        ir += rate * dwell
        ud = c_stream_u(base, k)
        k += 1
        e = -log(c_stream_u(base, k))
        k += 1
        if size == capacity:
            capacity *= 2
            times_a = np.resize(times_a, capacity)
            dxs_a = np.resize(dxs_a, capacity)
            dys_a = np.resize(dys_a, capacity)
            times = times_a
            dxs = dxs_a
            dys = dys_a
        if ud <= c_dir_prob(x, y):
            x += e
            times[size] = s
            dxs[size] = e
            dys[size] = 0.0
        else:
            y += e
            times[size] = s
            dxs[size] = 0.0
            dys[size] = e
        size += 1
    return times_a[:size].copy(), dxs_a[:size].copy(), dys_a[:size].copy(), ir


def tube_mc_batch(
    seed,
    double R,
    double A,
    double delta,
    double t,
    double T,
    double a,
    long long n_reps,
    long long rep0=0,
    int endpoint=1,
):
    """Tube-event success count; see kernels._pure.tube_mc_batch."""
    cdef u64 seed_u = <u64>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef u64 tube_base = c_mix2(seed_u, TAG_TUBE)
    cdef long long successes = 0
    cdef double rate = R * T
    cdef long long r
    cdef u64 base, k
    cdef double gap, s, dwell, size_j, gap_end
    cdef bint ok
    with nogil:
        for r in range(n_reps):
            base = c_mix2(tube_base, <u64>(rep0 + r))
            gap = a
            s = 0.0
            k = 0
            ok = True
            while True:
                dwell = -log(c_stream_u(base, k)) / rate
                k += 1
                if s + dwell >= t:
                    gap_end = gap - A * (t - s)
                    if endpoint:
                        ok = fabs(gap_end) < delta / 2.0
                    else:
                        ok = gap_end > -delta
                    break
                gap -= A * dwell
                if gap <= -delta:
                    ok = False
                    break
                size_j = -log(c_stream_u(base, k)) / T
                k += 1
                gap += size_j
                if gap >= delta:
                    ok = False
                    break
                s += dwell
            if ok:
                successes += 1
    return int(successes)


def moments_walk_batch(seed, long long j, long long n_reps, long long rep0=0):
    """Fixed-lineage discrete walk; see kernels._pure.moments_walk_batch."""
    out_d = np.empty(n_reps)
    out_s = np.empty(n_reps)
    cdef double[:] od = out_d
    cdef double[:] os_ = out_s
    cdef u64 seed_u = <u64>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef u64 mom_base = c_mix2(seed_u, TAG_MOMENTS)
    cdef long long r, step
    cdef u64 base
    cdef double x, y, ud, e
    with nogil:
        for r in range(n_reps):
            base = c_mix2(mom_base, <u64>(rep0 + r))
            x = 0.0
            y = 0.0
            for step in range(j):
                ud = c_stream_u(base, <u64>(2 * step))
                e = -log(c_stream_u(base, <u64>(2 * step + 1)))
                if ud <= c_dir_prob(x, y):
                    x += e
                else:
                    y += e
            od[r] = x - y
            os_[r] = x + y - j
    return out_d, out_s
