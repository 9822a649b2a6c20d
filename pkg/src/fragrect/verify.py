"""Verification suites: statistical and deterministic acceptance checks.

Each suite stresses one analytic quantity against an independent route:
Monte Carlo versus closed form, two representations of the same
functional, simulation versus proved bounds.  Suites are deterministic
given their seed and return a :class:`SuiteResult` with one line per
check.  ``run_suite`` dispatches by name; the CLI exposes the
simulation-facing suites, while tests/test_acceptance.py runs the whole
battery at full scale.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import coupling, kernels, model, simulator
from . import functionals as F
from .errors import VerificationError
from .optimizer import OptProblem, brute_force_oracle, optimize
from .paths import (
    GoodSetSpec,
    HybridPath,
    PLGrid,
    Track,
    grid_distance,
    is_good,
    levy_track_distance,
    levy_track_within,
    levy_within,
    quantize_to_cover,
    sup_distance,
    tube_set,
)

__all__ = [
    "SuiteResult",
    "run_suite",
    "CLI_SUITES",
    "ALL_SUITES",
    "random_good_grid",
    "random_e_track",
]


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checks: List[Tuple[str, bool, str]] = field(default_factory=list)
    duration: float = 0.0

    def lines(self) -> List[str]:
        out = []
        for label, ok, detail in self.checks:
            status = "PASS" if ok else "FAIL"
            out.append(f"[{status}] {label}: {detail}")
        out.append(
            f"suite {self.name}: {'PASS' if self.passed else 'FAIL'} "
            f"({len(self.checks)} checks, {self.duration:.1f}s)"
        )
        return out


class _Suite:
    def __init__(self, name: str):
        self.name = name
        self.checks: List[Tuple[str, bool, str]] = []
        self.t0 = time.time()

    def check(self, label: str, ok: bool, detail: str = ""):
        self.checks.append((label, bool(ok), detail))

    def result(self) -> SuiteResult:
        passed = all(ok for _, ok, _ in self.checks)
        return SuiteResult(self.name, passed, self.checks, time.time() - self.t0)


# ---------------------------------------------------------------------------
# random path generators (shared with the test suite)
# ---------------------------------------------------------------------------


def random_good_grid(rng: np.random.Generator, n: int, M: float) -> PLGrid:
    """Uniform sample from the gridpoint-feasible band of the M-cone."""
    vals = np.zeros((2, n + 1))
    for c in range(2):
        v = 0.0
        for j in range(1, n + 1):
            s = j / n
            lo = max(v, s / M)
            hi = M * s
            v = rng.uniform(lo, hi)
            vals[c, j] = v
    return PLGrid(n, vals)


def random_e_track(
    rng: np.random.Generator, n_seg: int = 6, n_jump: int = 3, scale: float = 0.4
) -> Track:
    """Random monotone cadlag track: piecewise linear plus jumps."""
    ts = np.unique(np.concatenate(([0.0], rng.uniform(0.02, 0.98, n_seg), [1.0])))
    vals = np.concatenate(([0.0], np.cumsum(rng.exponential(scale, len(ts) - 1))))
    jt = np.unique(rng.uniform(0.02, 0.98, n_jump))
    jt = jt[~np.isin(jt, ts)]
    js = rng.exponential(scale / 2, len(jt))
    times = np.concatenate((ts, jt))
    order = np.argsort(times)
    times = times[order]
    base = np.interp(times, ts, vals)
    jumps = np.zeros_like(times)
    cum = 0.0
    out_vals = np.empty_like(times)
    for i, t in enumerate(times):
        k = np.searchsorted(jt, t)
        if k < len(jt) and jt[k] == t:
            cum += js[k]
            jumps[i] = js[k]
        out_vals[i] = base[i] + cum
    return Track(times, out_vals, jumps)


# ---------------------------------------------------------------------------
# criterion 1: straight-line growth rate consistency
# ---------------------------------------------------------------------------


def suite_kappa_consistency(seed: int = 101, samples: int = 100, tol: float = 1e-8) -> SuiteResult:
    s = _Suite("kappa-consistency")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        lam = math.exp(rng.uniform(math.log(0.05), math.log(10.0)))
        mu = math.exp(rng.uniform(math.log(0.05), math.log(10.0)))
        kt = F.rate_Ktilde(HybridPath.linear(lam, mu), 0.0, 1.0)
        worst = max(worst, abs(kt - F.kappa(lam, mu)))
    s.check(
        f"|Kt(linear)-kappa| on {samples} random slope pairs",
        worst <= tol,
        f"worst {worst:.2e} <= {tol:.0e}",
    )
    return s.result()


# ---------------------------------------------------------------------------
# criterion 2: two representations of the growth functional
# ---------------------------------------------------------------------------


def suite_form_equivalence(
    seed: int = 102, paths: int = 500, n: int = 16, M: float = 3.0, tol: float = 1e-8
) -> SuiteResult:
    s = _Suite("form-equivalence")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(paths):
        f = random_good_grid(rng, n, M).to_path()
        a, b = F.ktilde_forms(f, 0.0, 1.0)
        worst = max(worst, abs(a - b))
    s.check(
        f"definition vs expanded form on {paths} grid paths (n={n}, M={M})",
        worst <= tol,
        f"worst {worst:.2e} <= {tol:.0e}",
    )
    return s.result()


# ---------------------------------------------------------------------------
# criterion 3: named growth-rate values
# ---------------------------------------------------------------------------


def suite_named_values(tol: float = 1e-6) -> SuiteResult:
    s = _Suite("named-values")
    half = F.rate_K(HybridPath.linear(0.5, 0.5))
    target = 2.0 * math.sqrt(2.0) - 2.0
    s.check("K(half-diagonal)", abs(half.value - target) <= tol, f"{half.value:.9f} vs {target:.9f}")
    diag = F.rate_K(HybridPath.linear(1.0, 1.0))
    s.check("K(unit diagonal)", abs(diag.value - 1.0) <= tol, f"{diag.value:.9f} vs 1")
    fast = F.rate_K(HybridPath.linear(10.0, 10.0))
    s.check("K(slope-10 diagonal)", fast.value == -math.inf, f"{fast.value} (extinct)")
    return s.result()


# ---------------------------------------------------------------------------
# criterion 4: population mean, two routes
# ---------------------------------------------------------------------------


def suite_mto(
    seed: int = 104,
    t: float = 2.0,
    trees: int = 10_000,
    replicas: int = 100_000,
    threads: int = 1,
) -> SuiteResult:
    s = _Suite("mto")
    direct, direct_se, _ = simulator.direct_population_mean(seed, t, trees)
    spine, spine_se = simulator.many_to_one_estimate(
        kernels.mix2(seed, 0xD1F), t, replicas, threads=threads
    )
    joint = math.hypot(direct_se, spine_se)
    diff = abs(direct - spine)
    s.check(
        f"direct ({trees} trees) vs weighted single-particle ({replicas} reps) at t={t}",
        diff <= 3.0 * joint,
        f"direct {direct:.4f}+-{direct_se:.4f}, spine {spine:.4f}+-{spine_se:.4f}, "
        f"|diff|={diff:.4f} <= 3*{joint:.4f}",
    )
    return s.result()


# ---------------------------------------------------------------------------
# criterion 5: discrete moment bounds
# ---------------------------------------------------------------------------


def suite_moments(seed: int = 105, j: int = 20, replicas: int = 100_000) -> SuiteResult:
    s = _Suite("moments")
    rep = simulator.discrete_moments(seed, j, replicas)
    bound2 = 2.0 * j
    bound4 = 12.0 * j * (j + 1)
    bound6 = 120.0 * j * (j * j + 6 * j + 11)
    s.check(
        "2nd moment of the coordinate gap",
        rep.delta2 + 3 * rep.delta2_se <= bound2,
        f"{rep.delta2:.2f}+3*{rep.delta2_se:.2f} <= {bound2}",
    )
    s.check(
        "4th moment of the coordinate gap",
        rep.delta4 + 3 * rep.delta4_se <= bound4,
        f"{rep.delta4:.1f}+3*{rep.delta4_se:.1f} <= {bound4}",
    )
    s.check(
        "6th moment of the coordinate gap",
        rep.delta6 + 3 * rep.delta6_se <= bound6,
        f"{rep.delta6:.0f}+3*{rep.delta6_se:.0f} <= {bound6}",
    )
    return s.result()


# ---------------------------------------------------------------------------
# criterion 6: coupled sandwich
# ---------------------------------------------------------------------------


def suite_coupling(
    seed: int = 106,
    runs: int = 10_000,
    interval: Tuple[float, float] = (0.0, 0.1),
    T: float = 50.0,
    radius: float = 1.0 / 16.0,
    M: float = 3.0,
) -> SuiteResult:
    s = _Suite("coupling")
    center = HybridPath.linear(0.5, 0.5)
    pset = tube_set(center, radius, M=M, T=T)
    violations = 0
    for r in range(runs):
        run = coupling.couple_simulate(seed, interval, pset, T, (0.0, 0.0), rep=r)
        m = run.in_set
        if np.any(run.x_minus[m] > run.x_mid[m]) or np.any(run.x_mid[m] > run.x_plus[m]):
            violations += 1
        elif np.any(run.y_minus[m] > run.y_mid[m]) or np.any(run.y_mid[m] > run.y_plus[m]):
            violations += 1
    s.check(
        f"ordering of the coupled triple over {runs} runs (while in set)",
        violations == 0,
        f"{violations} violations",
    )
    return s.result()


# ---------------------------------------------------------------------------
# criterion 7: tube probability bounds
# ---------------------------------------------------------------------------


def suite_tube(seed: int = 107, replicas: int = 100_000, threads: int = 1) -> SuiteResult:
    s = _Suite("tube")
    i = 0
    for R in (1.0, 2.0, 4.0):
        for A in (0.5, 1.0, 2.0):
            for delta in (0.2, 0.5):
                spec = coupling.TubeSpec(R=R, A=A, delta=delta, t=1.0, T=2000.0, a=0.0)
                bounds = coupling.tube_bounds(spec)
                est, se = coupling.tube_prob_mc(
                    kernels.mix2(seed, i), spec, replicas, threads=threads
                )
                i += 1
                lo = bounds.lower if bounds.lower is not None else 0.0
                ok = (
                    bounds.threshold < spec.T
                    and lo - 3 * se <= est
                    and est <= bounds.upper + 3 * se
                )
                s.check(
                    f"R={R} A={A} delta={delta}",
                    ok,
                    f"estimate {est:.4f}+-{se:.4f} in [{lo:.3g}, {bounds.upper:.3g}] "
                    f"(threshold {bounds.threshold:.0f})",
                )
    return s.result()


# ---------------------------------------------------------------------------
# criteria 8 and 9: finite-horizon growth and extinction
# ---------------------------------------------------------------------------


def suite_growth(
    seed: int = 108,
    T: float = 15.0,
    radius: float = 0.3,
    seeds: int = 20,
    cap: int = 1_000_000,
    band: Tuple[float, float] = (0.5, 1.3),
) -> SuiteResult:
    s = _Suite("growth")
    center = HybridPath.linear(1.0, 1.0)
    pset = tube_set(center, radius)
    stats = []
    censored = 0
    for k in range(seeds):
        tree = simulator.expand_tree(
            kernels.mix2(seed, k), t=T, cap=cap, prune_set=pset, prune_T=T, on_cap="truncate"
        )
        n = simulator.count_in_set(tree, T, pset)
        if tree.truncated:
            censored += 1
        stats.append(math.log(max(n, 1)) / T)
    stats.sort()
    median = 0.5 * (stats[(seeds - 1) // 2] + stats[seeds // 2])
    s.check(
        f"median growth exponent over {seeds} seeds (tube radius {radius}, cap {cap})",
        band[0] <= median <= band[1],
        f"median {median:.3f} in [{band[0]}, {band[1]}]; "
        f"{censored} runs cap-censored (counts are lower bounds)",
    )
    return s.result()


def suite_extinction(
    seed: int = 109,
    T: float = 15.0,
    slope: float = 10.0,
    radius: float = 0.5,
    seeds: int = 20,
    cap: int = 1_000_000,
) -> SuiteResult:
    s = _Suite("extinction")
    center = HybridPath.linear(slope, slope)
    pset = tube_set(center, radius)
    counts = []
    for k in range(seeds):
        tree = simulator.expand_tree(
            kernels.mix2(seed, k), t=T, cap=cap, prune_set=pset, prune_T=T
        )
        counts.append(simulator.count_in_set(tree, T, pset))
    s.check(
        f"population following the slope-{slope} ray over {seeds} seeds",
        all(c == 0 for c in counts),
        f"counts {counts}",
    )
    return s.result()


# ---------------------------------------------------------------------------
# criterion 10: covering quantization guarantees
# ---------------------------------------------------------------------------


def suite_cover(
    seed: int = 110, trials: int = 1000, M: float = 2.0, n: int = 16
) -> SuiteResult:
    s = _Suite("cover")
    T = (4.0 * M * n) ** 1.5
    spec = GoodSetSpec(M, T)
    failures = 0
    accepted = 0
    attempts = 0
    rep = 0
    while accepted < trials and attempts < 20 * trials:
        attempts += 1
        state = simulator.spine_simulate(seed, T, rep=rep)
        rep += 1
        h = state.rescaled_path(T)
        if not is_good(h, spec).ok:
            continue
        accepted += 1
        g = quantize_to_cover(h, n)
        gp = g.to_path()
        ok = grid_distance(gp, h, n) < 1.0 / n**2
        ok = ok and levy_within(gp, h, 1.0 / n)
        ok = ok and is_good(gp, GoodSetSpec(4.0 * M)).ok
        if not ok:
            failures += 1
    s.check(
        f"quantization guarantees on {accepted} qualifying trajectories "
        f"(M={M}, n={n}, T={T:.0f})",
        failures == 0 and accepted == trials,
        f"{failures} failures, acceptance {accepted}/{attempts}",
    )
    return s.result()


# ---------------------------------------------------------------------------
# criterion 11: metric suite
# ---------------------------------------------------------------------------


def _oracle_levy_scan(f: Track, g: Track, step: float = 1e-4) -> float:
    """Exhaustive ascending scan of the corridor feasibility predicate.

    Independent search route for the Levy distance: evaluates the
    two-sided corridor condition on every radius of a uniform grid and
    returns the first feasible one.  Vectorized over the whole grid.
    """
    from .paths import sup_track_distance

    hi = sup_track_distance(f, g) + 2.0 * step
    rs = np.arange(0.0, hi + step, step)
    nr = len(rs)

    def condition(p: Track, q: Track, lo_of_r, hi_of_r):
        # sup over x in [lo(r), hi(r)] of p(x) - q(x+r) <= r for each r.
        # One-sided values are taken exactly at each track's own
        # breakpoints (cf. paths._sup_diff).
        np_, nq = len(p.times), len(q.times)
        p_left = p.values - p.jumps
        q_left = q.values - q.jumps
        # endpoints
        E = np.stack((lo_of_r, hi_of_r), axis=1)
        Es = E + rs[:, None]
        d_end = np.maximum(
            p.eval_many(E.ravel()).reshape(nr, 2) - q.eval_many(Es.ravel()).reshape(nr, 2),
            p.eval_left_many(E.ravel()).reshape(nr, 2)
            - q.eval_left_many(Es.ravel()).reshape(nr, 2),
        )
        # p's breakpoints: exact one-sided p values
        Xp = np.broadcast_to(p.times[None, :], (nr, np_))
        Xps = p.times[None, :] + rs[:, None]
        d_p = np.maximum(
            p.values[None, :] - q.eval_many(Xps.ravel()).reshape(nr, np_),
            p_left[None, :] - q.eval_left_many(Xps.ravel()).reshape(nr, np_),
        )
        d_p = np.where(
            (Xp >= lo_of_r[:, None]) & (Xp <= hi_of_r[:, None]), d_p, -np.inf
        )
        # q's breakpoints shifted: exact one-sided q values
        Xq = q.times[None, :] - rs[:, None]
        d_q = np.maximum(
            p.eval_many(Xq.ravel()).reshape(nr, nq) - q.values[None, :],
            p.eval_left_many(Xq.ravel()).reshape(nr, nq) - q_left[None, :],
        )
        d_q = np.where(
            (Xq >= lo_of_r[:, None]) & (Xq <= hi_of_r[:, None]), d_q, -np.inf
        )
        sup = np.maximum(d_end.max(axis=1), np.maximum(d_p.max(axis=1), d_q.max(axis=1)))
        return sup <= rs

    ok = condition(g, f, -rs, 1.0 + rs) & condition(f, g, -2.0 * rs, np.ones(nr))
    idx = np.nonzero(ok)[0]
    return float(rs[idx[0]]) if idx.size else float(hi)


def suite_metrics(seed: int = 111, triples: int = 500, pairs: int = 200) -> SuiteResult:
    s = _Suite("metrics")
    rng = np.random.default_rng(seed)
    sym_worst = 0.0
    tri_worst = -math.inf
    for _ in range(triples):
        a = random_e_track(rng, scale=0.15)
        b = random_e_track(rng, scale=0.15)
        c = random_e_track(rng, scale=0.15)
        dab = levy_track_distance(a, b)
        dba = levy_track_distance(b, a)
        sym_worst = max(sym_worst, abs(dab - dba))
        slack = levy_track_distance(a, c) - (dab + levy_track_distance(b, c))
        tri_worst = max(tri_worst, slack)
    s.check(f"symmetry on {triples} random triples", sym_worst <= 1e-9, f"worst {sym_worst:.2e}")
    s.check(
        f"triangle inequality on {triples} random triples",
        tri_worst <= 2e-9,
        f"worst slack {tri_worst:.2e}",
    )
    oracle_worst = 0.0
    for _ in range(pairs):
        a = random_e_track(rng, scale=0.15)
        b = random_e_track(rng, scale=0.15)
        d = levy_track_distance(a, b)
        r = _oracle_levy_scan(a, b)
        oracle_worst = max(oracle_worst, abs(r - d))
    s.check(
        f"binary search vs grid-scan oracle on {pairs} pairs",
        oracle_worst <= 1e-4 + 1e-9,
        f"worst {oracle_worst:.2e}",
    )
    return s.result()


# ---------------------------------------------------------------------------
# criterion 12: deterministic rate sandwich
# ---------------------------------------------------------------------------


def suite_sandwich(
    seed: int = 112, paths: int = 100, n: int = 64, M: float = 2.0, T: float = 1e6
) -> SuiteResult:
    s = _Suite("sandwich")
    rng = np.random.default_rng(seed)
    failures = 0
    checks = 0
    j_min = int(math.ceil(math.sqrt(n)))
    for _ in range(paths):
        grid = random_good_grid(rng, n, M)
        f = grid.to_path()
        pset = tube_set(f, 1.0 / n**2, M=M, T=T)
        from .paths import box_envelope

        box = box_envelope(pset, n)
        for j in range(j_min, n):
            rates = F.envelope_rates(pset, n, j, T, box)
            delta = F.delta_bound(M, T, j, n, grid)
            smid = (j + 0.5) / n
            rx, ry = model.limit_component_rates(f.x.eval(smid), f.y.eval(smid))
            checks += 1
            if not (rates.rx_plus - delta <= rx <= rates.rx_minus + delta):
                failures += 1
            elif not (rates.ry_plus - delta <= ry <= rates.ry_minus + delta):
                failures += 1
    s.check(
        f"sandwich on {paths} grid paths x {n - j_min} intervals",
        failures == 0,
        f"{failures} failures out of {checks} midpoint checks",
    )
    return s.result()


# ---------------------------------------------------------------------------
# criterion 13: positivity region and transition paths
# ---------------------------------------------------------------------------


def suite_region_gamma(seed: int = 113, grid: int = 200, targets: int = 500) -> SuiteResult:
    s = _Suite("region-gamma")
    worst_outside = -math.inf
    for i in range(1, grid + 1):
        for j in range(i, grid + 1):
            lam = 10.0 * i / grid
            mu = 10.0 * j / grid
            if not F.kappa_region_contains(lam, mu):
                worst_outside = max(worst_outside, F.kappa(lam, mu))
    s.check(
        f"kappa < 1e-12 outside the region ({grid}x{grid} grid)",
        worst_outside < 1e-12,
        f"max outside {worst_outside:.3e}",
    )
    rng = np.random.default_rng(seed)
    slope_worst = 0.0
    range_ok = True
    kappa_min = math.inf
    found = 0
    while found < targets:
        lam = rng.uniform(F.REGION_DIAG_LO, 10.0)
        mu = rng.uniform(lam, 10.0)
        if not F.kappa_region_contains(lam, mu) or F.kappa(lam, mu) <= 0.0:
            continue
        found += 1
        g = F.gamma_path(lam, mu)
        slope_worst = max(slope_worst, g.max_slope())
        for w in g.waypoints:
            if not (F.REGION_DIAG_LO <= min(w) and max(w) <= 10.0):
                range_ok = False
        for t in np.linspace(0.0, 1.0, 100):
            kappa_min = min(kappa_min, F.kappa(*g.eval(float(t))))
    s.check(
        f"transition-path slopes on {targets} targets",
        slope_worst <= 20.0 + 1e-12,
        f"max slope {slope_worst:.3f} <= 20",
    )
    s.check("transition-path range", range_ok, "waypoints within the region box")
    s.check(
        "positivity along transition paths",
        kappa_min > 0.0,
        f"min kappa along paths {kappa_min:.4f}",
    )
    return s.result()


# ---------------------------------------------------------------------------
# criterion 14: optimizer versus exhaustive oracle
# ---------------------------------------------------------------------------


def _oracle_problems(seed: int) -> List[Tuple[OptProblem, float]]:
    problems = []
    rng = np.random.default_rng(seed)
    endpoints = [(1.0, 1.0), (0.5, 0.5), (1.5, 2.0), (0.75, 1.25), (2.0, 2.0), (1.0, 2.0)]
    for i in range(20):
        n = 1 if i % 2 == 0 else 2
        M = 3.0 if i % 3 else 6.0
        if i % 4 < 2:
            problems.append((OptProblem(n=n, M=M), 0.5 if n == 2 else 0.1))
        else:
            z = endpoints[(i // 4) % len(endpoints)]
            problems.append((OptProblem(n=n, M=M, endpoint=z), 0.5 if n == 2 else 0.1))
    return problems


def suite_optimizer_oracle(seed: int = 114) -> SuiteResult:
    s = _Suite("optimizer-oracle")
    worst_gap = -math.inf
    for idx, (problem, q) in enumerate(_oracle_problems(seed)):
        oracle = brute_force_oracle(problem, q=q)
        result = optimize(problem, seed=kernels.mix2(seed, idx))
        if oracle.value == -math.inf:
            ok = True
            gap = 0.0
        else:
            gap = oracle.value - result.value
            ok = gap <= 1e-6
        worst_gap = max(worst_gap, gap)
        s.check(
            f"problem {idx} (n={problem.n}, M={problem.M}, endpoint={problem.endpoint})",
            ok,
            f"oracle {oracle.value:.6f} vs optimizer {result.value:.6f}",
        )
    return s.result()


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

ALL_SUITES: Dict[str, Callable[..., SuiteResult]] = {
    "kappa": suite_kappa_consistency,
    "forms": suite_form_equivalence,
    "named-values": suite_named_values,
    "mto": suite_mto,
    "moments": suite_moments,
    "coupling": suite_coupling,
    "tube": suite_tube,
    "growth": suite_growth,
    "extinction": suite_extinction,
    "cover": suite_cover,
    "metrics": suite_metrics,
    "sandwich": suite_sandwich,
    "region-gamma": suite_region_gamma,
    "optimizer-oracle": suite_optimizer_oracle,
}

# the CLI surface: simulation- and verification-facing suites
CLI_SUITES = (
    "mto",
    "moments",
    "coupling",
    "tube",
    "metrics",
    "sandwich",
    "cover",
    "optimizer-oracle",
)

_QUICK_OVERRIDES = {
    "kappa": dict(samples=20),
    "forms": dict(paths=50),
    "mto": dict(trees=1000, replicas=10_000),
    "moments": dict(replicas=10_000),
    "coupling": dict(runs=500),
    "tube": dict(replicas=5_000),
    "growth": dict(seeds=5, cap=200_000),
    "extinction": dict(seeds=5),
    "cover": dict(trials=100),
    "metrics": dict(triples=60, pairs=30),
    "sandwich": dict(paths=20),
    "region-gamma": dict(grid=80, targets=80),
}


def run_suite(
    name: str, quick: bool = False, seed: Optional[int] = None, threads: int = 1
) -> SuiteResult:
    """Run one verification suite by name.

    ``quick`` shrinks the replica counts for interactive use; the
    acceptance battery always runs at full scale.  ``threads`` splits
    replica ranges for the Monte Carlo suites (results are identical
    regardless of the split).
    """
    if name not in ALL_SUITES:
        raise VerificationError(f"unknown suite {name!r}; known: {', '.join(ALL_SUITES)}")
    fn = ALL_SUITES[name]
    kwargs = {}
    if quick and name in _QUICK_OVERRIDES:
        kwargs.update(_QUICK_OVERRIDES[name])
    if seed is not None and name != "named-values":
        kwargs["seed"] = seed
    if threads > 1 and name in ("mto", "tube"):
        kwargs["threads"] = threads
    return fn(**kwargs)
