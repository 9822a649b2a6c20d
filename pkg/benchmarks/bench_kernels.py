"""Benchmark: compiled kernel lane versus the pure-Python fallback.

Runs each hot kernel on both lanes with identical seeds (the outputs
are bit-identical by construction) and prints wall times and speedups.

    python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

from fragrect.kernels import available_implementations, get_implementation


def time_call(fn, *args, repeat=3, **kwargs):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args, **kwargs)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    args = ap.parse_args()

    lanes = available_implementations()
    if "compiled" not in lanes:
        print("compiled lane not available; nothing to compare")
        return
    comp = get_implementation("compiled")
    pure = get_implementation("pure")

    scale = 0.2 if args.quick else 1.0
    workloads = [
        (
            "expand_tree (t=11)",
            lambda impl: impl.expand_tree(42, t_max=9.0 if args.quick else 11.0),
        ),
        (
            "spine_batch (t=3)",
            lambda impl: impl.spine_batch(7, 3.0, int(20_000 * scale)),
        ),
        (
            "tube_mc (R=2, T=2000)",
            lambda impl: impl.tube_mc_batch(
                3, 2.0, 2.0, 0.3, 1.0, 2000.0, 0.0, int(2_000 * scale), 0, 1
            ),
        ),
        (
            "moments_walk (j=20)",
            lambda impl: impl.moments_walk_batch(5, 20, int(50_000 * scale)),
        ),
    ]

    print(f"{'kernel':28s} {'compiled':>10s} {'pure':>10s} {'speedup':>9s}")
    for name, call in workloads:
        t_comp, out_c = time_call(call, comp)
        t_pure, out_p = time_call(call, pure, repeat=1)
        # sanity: identical outputs
        if isinstance(out_c, tuple) and isinstance(out_c[1], dict):
            assert all(np.array_equal(out_c[1][k], out_p[1][k]) for k in out_c[1])
        elif isinstance(out_c, tuple):
            assert all(np.array_equal(a, b) for a, b in zip(out_c, out_p) if hasattr(a, "shape"))
        else:
            assert out_c == out_p
        print(f"{name:28s} {t_comp:9.3f}s {t_pure:9.3f}s {t_pure / t_comp:8.1f}x")


if __name__ == "__main__":
    main()
