"""Rate functionals of the fragmentation process.

For a path f = (f_X, f_Y) in E^2 the following cost/growth functionals
are evaluated:

    I(f,a,b)  = int_a^b (sqrt(2 R*_X(f)) - sqrt(f_X'))^2
              + int_a^b (sqrt(2 R*_Y(f)) - sqrt(f_Y'))^2     (following cost)
    J(f,a,b)  = I(f,a,b) + singular increments of both tracks
    Kt(f,a,b) = int_a^b R*(f) - J(f,a,b)   (or -inf when J = inf)

and the headline growth rate K(f), which equals Kt(f,0,1) when the
cumulative profile s -> Kt(f,0,s) stays positive with positive initial
slope, -inf when the profile ever goes negative, and 0 otherwise.

Also here: the straight-line growth rate kappa(lambda, mu), the bounded
region where kappa is positive, the piecewise-linear gradient
transition paths through that region, the construction that grafts a
diagonal prefix onto an arbitrary path, per-interval extreme jump
rates over constraint-set boxes, the interval case quantities that
approximate I, and the explicit deterministic sandwich width delta.

Integration is exact on segments emanating from the origin (constant
coordinate ratio) and adaptive 5-point Gauss-Legendre elsewhere, with
segments split at diagonal crossings where the rate functions have a
kink.  Infinite values are carried as IEEE infinities, never silently
mixed: any expression that would produce inf - inf raises instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError
from .paths import BoxEnvelope, HybridPath, PathSet, PLGrid, box_envelope
from . import model

__all__ = [
    "rate_I",
    "rate_J",
    "rate_Ktilde",
    "ktilde_forms",
    "ktilde_profile",
    "rate_K",
    "KReport",
    "RateReport",
    "rate_report",
    "kappa",
    "KappaPoint",
    "kappa_point",
    "kappa_region_contains",
    "REGION_DIAG_LO",
    "REGION_DIAG_HI",
    "REGION_MU_MAX",
    "REGION_ELBOW",
    "GammaPath",
    "gamma_path",
    "IntervalRates",
    "envelope_rates",
    "CaseQuantity",
    "interval_case_quantities",
    "delta_bound",
    "build_h",
    "segment_rate_terms",
]

_SQRT2 = math.sqrt(2.0)

# region boundary constants: kappa(l, l) = -2l + 4 sqrt(l) - 1 has roots
# 3/2 +- sqrt(2); the region is cut off at mu = 10; the elbow waypoint
# sits at 3/2 + sqrt(2)/2.
REGION_DIAG_LO = 1.5 - math.sqrt(2.0)
REGION_DIAG_HI = 1.5 + math.sqrt(2.0)
REGION_MU_MAX = 10.0
REGION_ELBOW = 1.5 + math.sqrt(2.0) / 2.0


# ---------------------------------------------------------------------------
# piecewise integration of the rate integrands
# ---------------------------------------------------------------------------

_GL_NODES = (
    -0.906179845938663992797626878299,
    -0.538469310105683091036314420700,
    0.0,
    0.538469310105683091036314420700,
    0.906179845938663992797626878299,
)
_GL_WEIGHTS = (
    0.236926885056189087514264040720,
    0.478628670499366468041291514836,
    0.568888888888888888888888888889,
    0.478628670499366468041291514836,
    0.236926885056189087514264040720,
)


def _gl5(x0, y0, sx, sy, a, b):
    """5-point Gauss-Legendre of (I-term, R*, cross) over [a, b].

    Scalar arithmetic on purpose: this sits inside the optimizer's inner
    loop where small-array overhead dominates.
    """
    h = 0.5 * (b - a)
    c = 0.5 * (a + b)
    rsx = math.sqrt(sx)
    rsy = math.sqrt(sy)
    acc_i = 0.0
    acc_r = 0.0
    acc_c = 0.0
    for k in range(5):
        u = c + h * _GL_NODES[k]
        w = _GL_WEIGHTS[k]
        x = x0 + sx * u
        y = y0 + sy * u
        q = y / x
        rx = (q if q > 1.0 else 1.0) - 0.5
        ry = (1.0 / q if q < 1.0 else 1.0) - 0.5
        rstar = q if q > 1.0 else 1.0 / q
        tx = math.sqrt(2.0 * rx) - rsx
        ty = math.sqrt(2.0 * ry) - rsy
        cross = math.sqrt(rx) * rsx + math.sqrt(ry) * rsy
        acc_i += w * (tx * tx + ty * ty)
        acc_r += w * rstar
        acc_c += w * cross
    return (h * acc_i, h * acc_r, h * acc_c * 2.0 * _SQRT2)


def _adaptive(x0, y0, sx, sy, a, b, tol, depth=0):
    wi, wr, wc = _gl5(x0, y0, sx, sy, a, b)
    mid = 0.5 * (a + b)
    li, lr, lc = _gl5(x0, y0, sx, sy, a, mid)
    ri, rr, rc = _gl5(x0, y0, sx, sy, mid, b)
    err = max(abs(li + ri - wi), abs(lr + rr - wr), abs(lc + rc - wc))
    if err <= tol or depth >= 40:
        return (li + ri, lr + rr, lc + rc)
    a_i, a_r, a_c = _adaptive(x0, y0, sx, sy, a, mid, 0.5 * tol, depth + 1)
    b_i, b_r, b_c = _adaptive(x0, y0, sx, sy, mid, b, 0.5 * tol, depth + 1)
    return (a_i + b_i, a_r + b_r, a_c + b_c)


_KIND_SMOOTH = 0
_KIND_CONST = 1  # constant integrand (segment from the origin)
_KIND_INF = 2


@dataclass
class _Piece:
    t0: float
    t1: float
    kind: int
    x0: float
    y0: float
    sx: float
    sy: float
    const: Optional[Tuple[float, float, float]] = None  # (i_term, rstar, cross) densities

    def integrate(self, a: float, b: float, tol: float) -> np.ndarray:
        """(I, R*, cross) contributions over [a, b] within the piece."""
        if b <= a:
            return np.zeros(3)
        if self.kind == _KIND_INF:
            return np.array([math.inf, math.inf, math.inf])
        if self.kind == _KIND_CONST:
            length = b - a
            return np.array([c * length for c in self.const])
        ua = a - self.t0
        ub = b - self.t0
        # split where the coordinates cross (kink of the v operations)
        if self.sx != self.sy:
            ustar = (self.y0 - self.x0) / (self.sx - self.sy)
            if ua < ustar < ub:
                l1, l2, l3 = _adaptive(self.x0, self.y0, self.sx, self.sy, ua, ustar, 0.5 * tol)
                r1, r2, r3 = _adaptive(self.x0, self.y0, self.sx, self.sy, ustar, ub, 0.5 * tol)
                return np.array([l1 + r1, l2 + r2, l3 + r3])
        return np.array(_adaptive(self.x0, self.y0, self.sx, self.sy, ua, ub, tol))


def _segment_kind(x0, y0, sx, sy):
    if x0 > 0.0 and y0 > 0.0:
        return _KIND_SMOOTH, None
    if x0 == 0.0 and y0 == 0.0:
        if sx > 0.0 and sy > 0.0:
            rx = max(sy / sx, 1.0) - 0.5
            ry = max(sx / sy, 1.0) - 0.5
            rstar = max(sx / sy, sy / sx)
            i_term = (math.sqrt(2.0 * rx) - math.sqrt(sx)) ** 2 + (
                math.sqrt(2.0 * ry) - math.sqrt(sy)
            ) ** 2
            cross = 2.0 * _SQRT2 * (math.sqrt(rx * sx) + math.sqrt(ry * sy))
            return _KIND_CONST, (i_term, rstar, cross)
        if sx == 0.0 and sy == 0.0:
            # resting at the origin: R*_X = R*_Y = 1/2, R* = 1
            return _KIND_CONST, (2.0, 1.0, 0.0)
        # exactly one coordinate leaves zero: the other's limit rate is
        # infinite on a set of positive measure
        return _KIND_INF, None
    # exactly one coordinate is zero at the segment start: either it
    # stays zero (infinite companion rate throughout) or it grows from
    # zero next to a positive companion (non-integrable divergence)
    return _KIND_INF, None


def segment_rate_terms(x0, y0, sx, sy, length, tol=1e-12):
    """(I, R*, cross) contributions of one linear segment.

    The segment starts at (x0, y0) with nonnegative slopes (sx, sy) and
    has the given length in time.  Entries are +inf if the segment's
    cost diverges.
    """
    if length <= 0.0:
        return np.zeros(3)
    kind, const = _segment_kind(x0, y0, sx, sy)
    piece = _Piece(0.0, length, kind, x0, y0, sx, sy, const)
    return piece.integrate(0.0, length, tol)


class _PathFunctional:
    """Piece decomposition of a path with prefix sums of the rate integrals."""

    def __init__(self, f: HybridPath, tol: float = 1e-12):
        self.f = f
        self.tol = tol
        times = np.unique(np.concatenate((f.x.times, f.y.times)))
        pieces: List[_Piece] = []
        for t0, t1 in zip(times[:-1], times[1:]):
            x0 = f.x.eval(t0)
            y0 = f.y.eval(t0)
            x1 = f.x.eval_left(t1)
            y1 = f.y.eval_left(t1)
            dt = t1 - t0
            sx = max((x1 - x0) / dt, 0.0)
            sy = max((y1 - y0) / dt, 0.0)
            kind, const = _segment_kind(x0, y0, sx, sy)
            pieces.append(_Piece(float(t0), float(t1), kind, x0, y0, sx, sy, const))
        self.pieces = pieces
        # per-piece totals and prefix sums over the finite pieces; the
        # infinite flags gate any use of the prefix differences
        totals = np.zeros((len(pieces), 3))
        self.inf_flag = np.zeros(len(pieces), dtype=bool)
        for i, piece in enumerate(pieces):
            if piece.kind == _KIND_INF:
                self.inf_flag[i] = True
            else:
                totals[i] = piece.integrate(piece.t0, piece.t1, tol)
        self.prefix = np.zeros((len(pieces) + 1, 3))
        np.cumsum(totals, axis=0, out=self.prefix[1:])
        self.inf_count = np.zeros(len(pieces) + 1, dtype=np.int64)
        np.cumsum(self.inf_flag, out=self.inf_count[1:])
        self.boundaries = times

    def _piece_index(self, s: float) -> int:
        idx = int(np.searchsorted(self.boundaries, s, side="right")) - 1
        return min(max(idx, 0), len(self.pieces) - 1)

    def integrals(self, a: float, b: float) -> np.ndarray:
        """(I, R*, cross) over [a, b]."""
        if not (0.0 <= a <= b <= 1.0):
            raise DomainError(f"invalid interval ({a}, {b})")
        if a == b:
            return np.zeros(3)
        ia = self._piece_index(a)
        ib = self._piece_index(b)
        if b == self.pieces[ib].t0 and ib > 0:
            ib -= 1
        if self.inf_count[ib + 1] - self.inf_count[ia] > 0:
            return np.array([math.inf, math.inf, math.inf])
        if ia == ib:
            return self.pieces[ia].integrate(a, b, self.tol)
        head = self.pieces[ia].integrate(a, self.pieces[ia].t1, self.tol)
        tail = self.pieces[ib].integrate(self.pieces[ib].t0, b, self.tol)
        middle = self.prefix[ib] - self.prefix[ia + 1]
        return head + middle + tail

    def jumps(self, a: float, b: float) -> float:
        return self.f.x.total_jump(a, b) + self.f.y.total_jump(a, b)

    def ktilde(self, a: float, b: float) -> float:
        vals = self.integrals(a, b)
        i_val = vals[0]
        total_j = i_val + self.jumps(a, b)
        if math.isinf(total_j):
            return -math.inf
        return vals[1] - total_j

    def ktilde_alt(self, a: float, b: float) -> float:
        """Expanded representation: -int R* + 2 sqrt(2) cross terms - total increments."""
        vals = self.integrals(a, b)
        if math.isinf(vals[1]):
            return -math.inf
        incr = (
            self.f.x.eval(b)
            - self.f.x.eval(a)
            + self.f.y.eval(b)
            - self.f.y.eval(a)
        )
        return -vals[1] + vals[2] - incr


def rate_I(f: HybridPath, a: float, b: float, tol: float = 1e-12) -> float:
    """Following cost I(f, a, b); +inf when the path forces an infinite rate."""
    func = _PathFunctional(f, tol)
    return float(func.integrals(a, b)[0])


def rate_J(f: HybridPath, a: float, b: float, tol: float = 1e-12) -> float:
    """I plus the singular (jump) increments of both tracks on (a, b]."""
    func = _PathFunctional(f, tol)
    i_val = func.integrals(a, b)[0]
    return float(i_val + func.jumps(a, b))


def ktilde_forms(f: HybridPath, a: float, b: float, tol: float = 1e-12) -> Tuple[float, float]:
    """Both representations of Kt(f, a, b): definition form and expanded form."""
    func = _PathFunctional(f, tol)
    return func.ktilde(a, b), func.ktilde_alt(a, b)


def rate_Ktilde(
    f: HybridPath,
    a: float,
    b: float,
    tol: float = 1e-12,
    check_alt: bool = True,
    check_tol: float = 1e-6,
) -> float:
    """Cumulative growth functional Kt(f, a, b) (definition form).

    When finite and ``check_alt`` is set, the expanded representation is
    evaluated as a cross-check; disagreement beyond ``check_tol`` raises.
    """
    func = _PathFunctional(f, tol)
    val = func.ktilde(a, b)
    if check_alt and math.isfinite(val):
        alt = func.ktilde_alt(a, b)
        if abs(alt - val) > check_tol:
            raise RuntimeError(
                f"rate functional form mismatch: definition={val!r} expanded={alt!r}"
            )
    return val


def ktilde_profile(f: HybridPath, s_values: Sequence[float], tol: float = 1e-12) -> np.ndarray:
    """Kt(f, 0, s) for each s in ``s_values`` (entries may be -inf)."""
    func = _PathFunctional(f, tol)
    return np.array([func.ktilde(0.0, float(s)) for s in s_values])


@dataclass
class KReport:
    value: float
    classification: str  # "positive", "zero", "extinct"
    bottleneck: Optional[float]
    derivative0: float
    profile_s: np.ndarray
    profile_v: np.ndarray


@dataclass
class RateReport:
    """Evaluated functionals for one path over [a, b]."""

    i_value: float
    j_value: float
    k_value: float
    bottleneck: Optional[float]
    classification: str
    profile_s: np.ndarray
    profile_v: np.ndarray


def rate_report(f: HybridPath, a: float = 0.0, b: float = 1.0) -> RateReport:
    """Bundle I, J, K and the cumulative profile for one path."""
    func = _PathFunctional(f)
    vals = func.integrals(a, b)
    i_val = float(vals[0])
    j_val = float(i_val + func.jumps(a, b))
    k = rate_K(f)
    return RateReport(i_val, j_val, k.value, k.bottleneck, k.classification, k.profile_s, k.profile_v)


def rate_K(
    f: HybridPath,
    grid: int = 1024,
    tol: float = 1e-9,
    locate_tol: float = 1e-6,
    quad_tol: float = 1e-12,
) -> KReport:
    """Growth rate K(f) with bottleneck localization.

    The profile s -> Kt(f,0,s) is sampled on ``grid`` points plus all
    path breakpoints; sign changes are bisected to within
    ``locate_tol``.  K equals Kt(f,0,1) when the one-sided derivative at
    0 exceeds ``tol`` and the profile stays above -``tol``; -inf when
    the profile drops below -``tol`` anywhere; 0 otherwise.
    """
    func = _PathFunctional(f, quad_tol)
    s_vals = np.unique(
        np.concatenate((np.linspace(0.0, 1.0, grid + 1), func.boundaries))
    )
    prof = np.array([func.ktilde(0.0, float(s)) for s in s_vals])

    h = min(1.0 / grid, (func.boundaries[1] if len(func.boundaries) > 1 else 1.0))
    kh = func.ktilde(0.0, h)
    deriv0 = -math.inf if math.isinf(kh) else kh / h

    neg_idx = None
    for i, v in enumerate(prof):
        if s_vals[i] > 0.0 and v < -tol:
            neg_idx = i
            break

    bottleneck = None
    if neg_idx is not None:
        lo = s_vals[neg_idx - 1] if neg_idx > 0 else 0.0
        hi = s_vals[neg_idx]
        while hi - lo > locate_tol:
            mid = 0.5 * (lo + hi)
            if func.ktilde(0.0, mid) < -tol:
                hi = mid
            else:
                lo = mid
        bottleneck = 0.5 * (lo + hi)
        return KReport(-math.inf, "extinct", bottleneck, deriv0, s_vals, prof)

    interior = prof[(s_vals > 0.0)]
    if deriv0 > tol and np.all(interior > tol):
        return KReport(float(prof[-1]), "positive", None, deriv0, s_vals, prof)
    # profile touches zero somewhere (or starts flat): critical case
    touch = None
    cand = np.where((s_vals > 0.0) & (prof <= tol))[0]
    if cand.size:
        touch = float(s_vals[cand[0]])
    return KReport(0.0, "zero", touch, deriv0, s_vals, prof)


# ---------------------------------------------------------------------------
# straight-line growth rate and the positive region
# ---------------------------------------------------------------------------


def kappa(lam: float, mu: float) -> float:
    """Growth rate per unit time along the straight path (lam*s, mu*s).

    Defined for mu >= lam > 0; arguments are canonically swapped
    otherwise (the model is symmetric under coordinate exchange).
    """
    if not (lam > 0.0 and mu > 0.0):
        raise DomainError("kappa requires strictly positive slopes")
    if lam > mu:
        lam, mu = mu, lam
    ratio = mu / lam
    return (
        ratio
        - (_SQRT2 * math.sqrt(ratio - 0.5) - math.sqrt(lam)) ** 2
        - (1.0 - math.sqrt(mu)) ** 2
    )


@dataclass(frozen=True)
class KappaPoint:
    """A slope pair in canonical order (mu >= lam) with its growth rate."""

    lam: float
    mu: float
    value: float


def kappa_point(lam: float, mu: float) -> KappaPoint:
    """Evaluate kappa with the canonical coordinate swap recorded."""
    if lam > mu:
        lam, mu = mu, lam
    return KappaPoint(lam, mu, kappa(lam, mu))


def kappa_region_contains(lam: float, mu: float) -> bool:
    """Membership in the region where kappa can be positive.

    The region is the union of
      {lam in (3/2 - sqrt2, 3/2 + sqrt2), mu in [lam, 10)}   and
      {mu in (3/2 + sqrt2, 10), lam in [3/2 + sqrt2, mu]},
    with boundaries exactly as printed.  Requires mu >= lam > 0.
    """
    if not (mu >= lam > 0.0):
        raise DomainError("region membership requires mu >= lam > 0")
    in_one = REGION_DIAG_LO < lam < REGION_DIAG_HI and lam <= mu < REGION_MU_MAX
    in_two = REGION_DIAG_HI < mu < REGION_MU_MAX and REGION_DIAG_HI <= lam <= mu
    return in_one or in_two


@dataclass
class GammaPath:
    """Piecewise-linear gradient transition from (1/2, 1/2) to a target.

    Parameterized on [0, 1] with componentwise slopes bounded by 20.
    """

    waypoints: List[Tuple[float, float]]
    times: List[float]  # cumulative, times[0] = 0, times[-1] = 1

    def eval(self, t: float) -> Tuple[float, float]:
        if not (0.0 <= t <= 1.0):
            raise DomainError(f"gamma path parameter {t} outside [0, 1]")
        ts = self.times
        if t >= ts[-1]:
            return self.waypoints[-1]
        i = 0
        while ts[i + 1] < t:
            i += 1
        w0 = self.waypoints[i]
        w1 = self.waypoints[i + 1]
        span = ts[i + 1] - ts[i]
        w = 0.0 if span == 0.0 else (t - ts[i]) / span
        return (w0[0] + w * (w1[0] - w0[0]), w0[1] + w * (w1[1] - w0[1]))

    def max_slope(self) -> float:
        best = 0.0
        for i in range(len(self.waypoints) - 1):
            span = self.times[i + 1] - self.times[i]
            if span == 0.0:
                continue
            dx = abs(self.waypoints[i + 1][0] - self.waypoints[i][0]) / span
            dy = abs(self.waypoints[i + 1][1] - self.waypoints[i][1]) / span
            best = max(best, dx, dy)
        return best


def gamma_path(lam: float, mu: float) -> GammaPath:
    """Transition path through the positive-kappa region to (lam, mu).

    Requires mu >= lam, membership in the region, and kappa > 0 at the
    target.  Within the lower sub-region the path goes via (lam, lam);
    within the upper one via the elbow point.  Time is allocated
    proportionally to leg length so componentwise slopes stay <= 20.
    """
    if lam > mu:
        raise DomainError("gamma path requires mu >= lam (canonical order)")
    if not kappa_region_contains(lam, mu):
        raise DomainError(
            f"target ({lam}, {mu}) outside the positive-kappa region"
        )
    if not kappa(lam, mu) > 0.0:
        raise DomainError(f"kappa({lam}, {mu}) <= 0; no transition path exists")

    start = (0.5, 0.5)
    if REGION_DIAG_LO < lam < REGION_DIAG_HI:
        waypoints = [start, (lam, lam), (lam, mu)]
    else:
        c = REGION_ELBOW
        waypoints = [start, (c, c), (c, mu), (lam, mu)]
    # drop zero-length legs
    cleaned = [waypoints[0]]
    for w in waypoints[1:]:
        if w != cleaned[-1]:
            cleaned.append(w)
    if len(cleaned) == 1:
        return GammaPath([start, start], [0.0, 1.0])
    lengths = [
        max(abs(b[0] - a[0]), abs(b[1] - a[1]))
        for a, b in zip(cleaned[:-1], cleaned[1:])
    ]
    total = sum(lengths)
    times = [0.0]
    for L in lengths:
        times.append(times[-1] + L / total)
    times[-1] = 1.0
    return GammaPath(cleaned, times)


# ---------------------------------------------------------------------------
# interval rates, case quantities, sandwich width
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntervalRates:
    """Extreme per-coordinate jump rates over an interval box at scale T."""

    rx_minus: float
    rx_plus: float
    ry_minus: float
    ry_plus: float


def envelope_rates(
    pset: PathSet, n: int, j: int, T: float, box: Optional[BoxEnvelope] = None
) -> IntervalRates:
    """Extreme values of R_X(T .), R_Y(T .) over the interval box of [j/n, (j+1)/n].

    R_X is decreasing in x and increasing in y, so its extremes over a
    box are attained at opposite corners; symmetrically for R_Y.
    """
    if box is None:
        box = box_envelope(pset, n)
    if box.empty:
        raise DomainError("constraint set has an empty box envelope")
    xl, xh, yl, yh = box.interval_box(j)
    rx_plus, ry_minus = model.component_rates(T * xl, T * yh)
    rx_minus, ry_plus = model.component_rates(T * xh, T * yl)
    return IntervalRates(rx_minus, rx_plus, ry_minus, ry_plus)


@dataclass(frozen=True)
class CaseQuantity:
    """Per-coordinate interval case and squared-root cost contributions."""

    component: str  # "X" or "Y"
    case: str  # "minus", "plus", "neither"
    e_plus: float
    e_minus: float


def _case_quantity(component, r_minus, r_plus, gap_plus, gap_minus, length) -> CaseQuantity:
    drift_min = 2.0 * r_minus * length
    drift_max = 2.0 * r_plus * length
    if drift_min > gap_plus:
        e_plus = (math.sqrt(drift_min) - math.sqrt(max(gap_plus, 0.0))) ** 2
        e_minus = (math.sqrt(drift_max) - math.sqrt(max(gap_minus, 0.0))) ** 2
        return CaseQuantity(component, "minus", e_plus, e_minus)
    if gap_minus > drift_max:
        e_plus = (math.sqrt(drift_max) - math.sqrt(gap_minus)) ** 2
        e_minus = (math.sqrt(drift_min) - math.sqrt(gap_plus)) ** 2
        return CaseQuantity(component, "plus", e_plus, e_minus)
    return CaseQuantity(component, "neither", 0.0, 0.0)


def interval_case_quantities(
    pset: PathSet, n: int, j: int, T: float, box: Optional[BoxEnvelope] = None
) -> Tuple[CaseQuantity, CaseQuantity]:
    """Case classification and cost quantities for both coordinates on I_j.

    The "minus" case holds when the smallest possible drift over the
    interval exceeds the largest admissible displacement; the "plus"
    case when the smallest admissible displacement exceeds the largest
    drift.  In the remaining case both quantities vanish.
    """
    if box is None:
        box = box_envelope(pset, n)
    rates = envelope_rates(pset, n, j, T, box)
    length = 1.0 / n
    gx_plus = float(box.x_hi[j + 1] - box.x_lo[j])
    gx_minus = float(box.x_lo[j + 1] - box.x_hi[j])
    gy_plus = float(box.y_hi[j + 1] - box.y_lo[j])
    gy_minus = float(box.y_lo[j + 1] - box.y_hi[j])
    qx = _case_quantity("X", rates.rx_minus, rates.rx_plus, gx_plus, gx_minus, length)
    qy = _case_quantity("Y", rates.ry_minus, rates.ry_plus, gy_plus, gy_minus, length)
    return qx, qy


def delta_bound(M: float, T: float, j: int, n: int, f: PLGrid) -> float:
    """Explicit width of the deterministic rate sandwich on interval j.

    delta(j, n) = (6 M^3 sqrt(n) + 2 M^2 n / T) * (x-increment of f on I_j)
                + M sqrt(n) * (y-increment)
                + 7 M^3 / n^{3/2} + 3 M^3 n / T.

    Hypotheses: M > 1, n >= 2M, j >= sqrt(n), and f inside the M-cone on
    the interval.
    """
    if not M > 1.0:
        raise DomainError("sandwich width requires M > 1")
    if n < 2 * M:
        raise DomainError(f"sandwich width requires n >= 2M (n={n}, M={M})")
    if j < math.sqrt(n):
        raise DomainError(f"sandwich width requires j >= sqrt(n) (j={j}, n={n})")
    if not (0 <= j < n):
        raise DomainError(f"interval index {j} out of range")
    for idx in (j, j + 1):
        s = idx / n
        for c in range(2):
            v = f.values[c, idx]
            if v < s / M - 1e-12 or v > M * s + 1e-12:
                raise DomainError(f"path leaves the M-cone at gridpoint {idx}")
    dfx = float(f.values[0, j + 1] - f.values[0, j])
    dfy = float(f.values[1, j + 1] - f.values[1, j])
    rootn = math.sqrt(n)
    return (
        (6.0 * M**3 * rootn + 2.0 * M**2 * n / T) * dfx
        + M * rootn * dfy
        + 7.0 * M**3 / n**1.5
        + 3.0 * M**3 * n / T
    )


# ---------------------------------------------------------------------------
# diagonal-prefix construction
# ---------------------------------------------------------------------------


def _initial_slope(track) -> float:
    t1 = track.times[1]
    return float(track.eval_left(t1) / t1)


def build_h(f: HybridPath, n: int, m: int) -> PLGrid:
    """Graft a diagonal prefix onto f via gradient steps.

    The output path follows (s/2, s/2) up to tau0 = ceil(n^{7/8})/n,
    changes gradient along the transition path at times
    tau_j = tau * m^{j-m} (tau = m^m * tau0), bridges linearly from its
    value at tau to f(2 tau), and from 2 tau onward interpolates f at
    the gridpoints.  Requires the initial slope pair of f to lie in the
    positive-kappa region with kappa > 0, and tau <= 1/2.
    """
    if m < 1:
        raise DomainError("gradient step count m must be >= 1")
    tau0_num = math.ceil(n ** (7.0 / 8.0))
    tau = (m**m) * tau0_num / n
    if tau > 0.5:
        raise DomainError(
            f"transition horizon tau={tau:.4g} exceeds 1/2; increase n or decrease m"
        )
    lam = _initial_slope(f.x)
    mu = _initial_slope(f.y)
    swapped = lam > mu
    if swapped:
        lam, mu = mu, lam
        fx, fy = f.y, f.x
    else:
        fx, fy = f.x, f.y
    if not (lam > 0.0 and mu > 0.0):
        raise DomainError("initial slopes must be strictly positive")
    if not kappa_region_contains(lam, mu):
        raise DomainError(
            f"initial slope pair ({lam}, {mu}) outside the positive-kappa region"
        )
    if not kappa(lam, mu) > 0.0:
        raise DomainError(f"kappa({lam}, {mu}) <= 0 at the initial slopes")

    gamma = gamma_path(lam, mu)
    # breakpoint times in grid units
    taus = [tau0_num * (m**jj) for jj in range(m + 1)]  # tau_j * n
    k2 = 2 * taus[-1]  # 2 tau * n

    gx = np.zeros(n + 1)
    gy = np.zeros(n + 1)
    # diagonal prefix
    idx = np.arange(0, taus[0] + 1)
    gx[idx] = 0.5 * idx / n
    gy[idx] = 0.5 * idx / n
    # gradient steps
    hx, hy = gx[taus[0]], gy[taus[0]]
    t_prev = taus[0]
    for jj in range(1, m + 1):
        lj, mj = gamma.eval(jj / m)
        idx = np.arange(t_prev + 1, taus[jj] + 1)
        ds = (idx - t_prev) / n
        gx[idx] = hx + lj * ds
        gy[idx] = hy + mj * ds
        hx, hy = gx[taus[jj]], gy[taus[jj]]
        t_prev = taus[jj]
    # bridge to f(2 tau)
    fx2 = fx.eval(k2 / n)
    fy2 = fy.eval(k2 / n)
    idx = np.arange(taus[-1] + 1, k2 + 1)
    w = (idx - taus[-1]) / (k2 - taus[-1])
    gx[idx] = hx + w * (fx2 - hx)
    gy[idx] = hy + w * (fy2 - hy)
    # gridpoint interpolation of f
    for i in range(k2, n + 1):
        gx[i] = fx.eval(i / n)
        gy[i] = fy.eval(i / n)

    vals = np.vstack((gy, gx)) if swapped else np.vstack((gx, gy))
    return PLGrid(n, vals)
