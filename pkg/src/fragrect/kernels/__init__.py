"""Kernel selection: compiled Cython lane with pure-Python fallback.

The compiled extension ``fragrect.kernels._ckernels`` is preferred when
importable; set the environment variable ``FRAGRECT_PURE=1`` to force
the pure lane.  Both lanes are bit-for-bit identical for a given seed
(see tests/test_kernels_parity.py), so the choice only affects speed.
"""

from __future__ import annotations

import os

from . import _pure

IMPLEMENTATION = "pure"
_impl = _pure

if os.environ.get("FRAGRECT_PURE", "") in ("", "0"):
    try:
        from . import _ckernels as _compiled

        _impl = _compiled
        IMPLEMENTATION = "compiled"
    except ImportError:
        pass

expand_tree = _impl.expand_tree
spine_batch = _impl.spine_batch
spine_path = _impl.spine_path
tube_mc_batch = _impl.tube_mc_batch
moments_walk_batch = _impl.moments_walk_batch

# RNG primitives are only needed at Python level (stub tests, coupling
# module); the pure lane is authoritative for these.
smix = _pure.smix
mix2 = _pure.mix2
unit53 = _pure.unit53
root_key = _pure.root_key
child_key = _pure.child_key
vertex_marks = _pure.vertex_marks
stream_base = _pure.stream_base
stream_u = _pure.stream_u

TAG_TREE = _pure.TAG_TREE
TAG_SPINE = _pure.TAG_SPINE
TAG_TUBE = _pure.TAG_TUBE
TAG_MOMENTS = _pure.TAG_MOMENTS
TAG_COUPLE = _pure.TAG_COUPLE


def available_implementations():
    """Names of the kernel lanes importable in this environment."""
    lanes = ["pure"]
    try:
        from . import _ckernels  # noqa: F401

        lanes.insert(0, "compiled")
    except ImportError:
        pass
    return lanes


def get_implementation(name: str):
    """Fetch a specific lane module ("pure" or "compiled")."""
    if name == "pure":
        return _pure
    if name == "compiled":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown kernel implementation {name!r}")
