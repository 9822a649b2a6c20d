"""Splitting rule of the rectangle fragmentation process.

A rectangle of base ``b`` and height ``h`` splits at rate

    r(b, h) = ((1 - log b)/(1 - log h)) v ((1 - log h)/(1 - log b)),

vertically (along its base) with probability

    p(b, h) = (1 - log h)/(2(1 - log b))          if b <= h,
              1 - (1 - log b)/(2(1 - log h))      if b > h.

In log coordinates x = -log b, y = -log h the same rule reads

    R(x, y) = (x+1)/(y+1) v (y+1)/(x+1),
    P(x, y) = (y+1)/(2(x+1))           if x >= y,
              1 - (x+1)/(2(y+1))       if x < y,

where P is the probability that the jump lands in the x coordinate.
R_X = R*P and R_Y = R*(1-P) are the per-coordinate jump rates; they have
the closed forms

    R_X(x, y) = ((y+1)/(x+1) v 1) - 1/2,
    R_Y(x, y) = ((x+1)/(y+1) v 1) - 1/2.

After rescaling space by T -> infinity the constants wash out, leaving
the homogeneous limits R*, P*, R*_X, R*_Y, which are infinite on the
open axes and carry explicit boundary conventions at the origin and on
the axes.

All functions accept scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Rect",
    "LogPoint",
    "SplitKernel",
    "LimitKernel",
    "PAPER_KERNEL",
    "PAPER_LIMIT_KERNEL",
    "split_rate_rect",
    "split_prob_rect",
    "branch_rate",
    "dir_prob",
    "component_rates",
    "limit_rate",
    "limit_dir_prob",
    "limit_component_rates",
]


@dataclass(frozen=True)
class Rect:
    """A rectangle with positive base and height (base <= 1 in the canonical process)."""

    base: float
    height: float

    def __post_init__(self):
        if not (self.base > 0 and self.height > 0):
            raise ValueError(f"rectangle dimensions must be positive, got {self.base}, {self.height}")

    def to_log(self) -> "LogPoint":
        return LogPoint(-np.log(self.base), -np.log(self.height))


@dataclass(frozen=True)
class LogPoint:
    """Position in log coordinates: x = -log base, y = -log height."""

    x: float
    y: float

    def __post_init__(self):
        if not (np.isfinite(self.x) and np.isfinite(self.y)):
            raise ValueError(f"coordinates must be finite, got {self.x}, {self.y}")


def _check_nonneg(x, y):
    if np.any(np.asarray(x) < 0) or np.any(np.asarray(y) < 0):
        raise ValueError("log coordinates must be nonnegative")


def split_rate_rect(rect: Rect) -> float:
    """Splitting rate r(b, h) of a rectangle."""
    a = 1.0 - np.log(rect.base)
    b = 1.0 - np.log(rect.height)
    return float(np.maximum(a / b, b / a))


def split_prob_rect(rect: Rect) -> float:
    """Probability p(b, h) that the rectangle splits vertically."""
    a = 1.0 - np.log(rect.base)  # = x + 1
    b = 1.0 - np.log(rect.height)  # = y + 1
    if rect.base <= rect.height:
        return float(b / (2.0 * a))
    return float(1.0 - a / (2.0 * b))


def branch_rate(x, y):
    """Branching rate R(x, y) = (x+1)/(y+1) v (y+1)/(x+1); always >= 1."""
    _check_nonneg(x, y)
    a = np.asarray(x, dtype=float) + 1.0
    b = np.asarray(y, dtype=float) + 1.0
    out = np.maximum(a / b, b / a)
    return float(out) if out.ndim == 0 else out


def dir_prob(x, y):
    """Probability P(x, y) that the next jump lands in the x coordinate."""
    _check_nonneg(x, y)
    a = np.asarray(x, dtype=float) + 1.0
    b = np.asarray(y, dtype=float) + 1.0
    out = np.where(a >= b, b / (2.0 * a), 1.0 - a / (2.0 * b))
    return float(out) if out.ndim == 0 else out


def component_rates(x, y):
    """Per-coordinate jump rates (R_X, R_Y) = (R*P, R*(1-P)) in closed form."""
    _check_nonneg(x, y)
    a = np.asarray(x, dtype=float) + 1.0
    b = np.asarray(y, dtype=float) + 1.0
    rx = np.maximum(b / a, 1.0) - 0.5
    ry = np.maximum(a / b, 1.0) - 0.5
    if rx.ndim == 0:
        return float(rx), float(ry)
    return rx, ry


def _ratio_or_inf(num, den):
    """num/den with the convention c/0 = +inf for c > 0 (array-safe)."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    out = np.full(np.broadcast(num, den).shape, np.inf)
    nz = den > 0
    np.divide(num, den, out=out, where=nz)
    return out


def limit_rate(x, y):
    """Rescaled limit rate R*(x, y) = x/y v y/x, with R*(0,0) = 1.

    On the open axes (exactly one coordinate zero) the value is +inf.
    """
    _check_nonneg(x, y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.maximum(_ratio_or_inf(x, y), _ratio_or_inf(y, x))
    origin = (x == 0) & (y == 0)
    out = np.where(origin, 1.0, out)
    return float(out) if out.ndim == 0 else out


def limit_dir_prob(x, y):
    """Rescaled limit probability P*(x, y), with P*(0,0) = 1/2."""
    _check_nonneg(x, y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        first = np.where(x > 0, y / (2.0 * np.where(x > 0, x, 1.0)), 0.0)
        second = 1.0 - np.where(y > 0, x / (2.0 * np.where(y > 0, y, 1.0)), 0.0)
    out = np.where(x >= y, first, second)
    origin = (x == 0) & (y == 0)
    out = np.where(origin, 0.5, out)
    # x = 0 < y falls in the second branch: P* = 1 exactly.
    out = np.where((x == 0) & (y > 0), 1.0, out)
    # y = 0 < x: first branch gives 0.
    out = np.where((y == 0) & (x > 0), 0.0, out)
    return float(out) if out.ndim == 0 else out


def limit_component_rates(x, y):
    """Rescaled per-coordinate rates (R*_X, R*_Y).

    R*_X = R* P* for y > 0 and 1/2 on y = 0; R*_Y symmetrically.  In the
    generic quadrant the closed forms are R*_X = (y/x v 1) - 1/2 (inf on
    x = 0 < y) and R*_Y = (x/y v 1) - 1/2 (inf on y = 0 < x).
    """
    _check_nonneg(x, y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    rx = np.maximum(_ratio_or_inf(y, x), 1.0) - 0.5
    ry = np.maximum(_ratio_or_inf(x, y), 1.0) - 0.5
    rx = np.where(y == 0, 0.5, rx)  # boundary convention, overrides origin too
    ry = np.where(x == 0, 0.5, ry)
    if rx.ndim == 0:
        return float(rx), float(ry)
    return rx, ry


class SplitKernel:
    """The splitting rule bundle (r, p, R, P, R_X, R_Y).

    The process ships a single fixed rule; this thin wrapper exists so
    alternative sensible splitting rules can be slotted in without
    touching the simulator.  Subclass and override the methods to
    experiment with other rules.
    """

    def rate_rect(self, rect: Rect) -> float:
        return split_rate_rect(rect)

    def prob_rect(self, rect: Rect) -> float:
        return split_prob_rect(rect)

    def rate(self, x, y):
        return branch_rate(x, y)

    def prob(self, x, y):
        return dir_prob(x, y)

    def component(self, x, y):
        return component_rates(x, y)


class LimitKernel:
    """Rescaled limit functions R*, P*, R*_X, R*_Y with boundary conventions."""

    def rate(self, x, y):
        return limit_rate(x, y)

    def prob(self, x, y):
        return limit_dir_prob(x, y)

    def component(self, x, y):
        return limit_component_rates(x, y)


PAPER_KERNEL = SplitKernel()
PAPER_LIMIT_KERNEL = LimitKernel()
