"""Bit-for-bit agreement between the compiled and pure kernel lanes.

Every random variate is a pure function of (seed, stream, counter), so
the two lanes must return identical arrays, not merely statistically
similar ones.  Skipped when the extension is unavailable.
"""

import numpy as np
import pytest

from fragrect.kernels import available_implementations, get_implementation

pytestmark = pytest.mark.skipif(
    "compiled" not in available_implementations(),
    reason="compiled kernel lane not built",
)


@pytest.fixture(scope="module")
def lanes():
    return get_implementation("pure"), get_implementation("compiled")


def test_tree_expansion_identical(lanes):
    pure, comp = lanes
    for seed in (1, 42, 2**63 + 17):
        s1, a1 = pure.expand_tree(seed, t_max=4.0)
        s2, a2 = comp.expand_tree(seed, t_max=4.0)
        assert s1 == s2
        for key in a1:
            assert np.array_equal(a1[key], a2[key]), key


def test_tree_generation_mode_identical(lanes):
    pure, comp = lanes
    _, a1 = pure.expand_tree(7, gen_max=8)
    _, a2 = comp.expand_tree(7, gen_max=8)
    for key in a1:
        assert np.array_equal(a1[key], a2[key]), key


def test_pruned_expansion_identical(lanes):
    pure, comp = lanes
    ts = np.array([0.0, 1.0])
    fx = np.array([0.0, 0.8])
    fy = np.array([0.0, 0.8])
    kwargs = dict(
        t_max=5.0,
        prune_ts=ts,
        prune_fx=fx,
        prune_fy=fy,
        prune_radius=0.4,
        prune_T=5.0,
        good_M=3.0,
        good_slack=0.1,
    )
    _, a1 = pure.expand_tree(3, **kwargs)
    _, a2 = comp.expand_tree(3, **kwargs)
    for key in a1:
        assert np.array_equal(a1[key], a2[key]), key


def test_cap_status_identical(lanes):
    pure, comp = lanes
    s1, a1 = pure.expand_tree(1, gen_max=12, cap=500)
    s2, a2 = comp.expand_tree(1, gen_max=12, cap=500)
    assert s1 == s2 == 1
    assert np.array_equal(a1["x"], a2["x"])


def test_spine_batch_identical(lanes):
    pure, comp = lanes
    for args in ((7, 2.0, 200, 0), (8, 0.5, 100, 50)):
        out1 = pure.spine_batch(*args)
        out2 = comp.spine_batch(*args)
        for a, b in zip(out1, out2):
            assert np.array_equal(a, b)


def test_spine_path_identical(lanes):
    pure, comp = lanes
    t1 = pure.spine_path(9, 3, 4.0)
    t2 = comp.spine_path(9, 3, 4.0)
    for a, b in zip(t1[:3], t2[:3]):
        assert np.array_equal(a, b)
    assert t1[3] == t2[3]


def test_tube_mc_identical(lanes):
    pure, comp = lanes
    for endpoint in (0, 1):
        k1 = pure.tube_mc_batch(11, 2.0, 1.5, 0.3, 1.0, 300.0, 0.05, 500, 0, endpoint)
        k2 = comp.tube_mc_batch(11, 2.0, 1.5, 0.3, 1.0, 300.0, 0.05, 500, 0, endpoint)
        assert k1 == k2


def test_tube_mc_split_invariance(lanes):
    pure, comp = lanes
    whole = comp.tube_mc_batch(5, 1.0, 1.0, 0.4, 1.0, 200.0, 0.0, 1000, 0, 1)
    parts = sum(
        comp.tube_mc_batch(5, 1.0, 1.0, 0.4, 1.0, 200.0, 0.0, 250, rep0, 1)
        for rep0 in (0, 250, 500, 750)
    )
    assert whole == parts


def test_moments_walk_identical(lanes):
    pure, comp = lanes
    d1, s1 = pure.moments_walk_batch(13, 15, 300)
    d2, s2 = comp.moments_walk_batch(13, 15, 300)
    assert np.array_equal(d1, d2)
    assert np.array_equal(s1, s2)
