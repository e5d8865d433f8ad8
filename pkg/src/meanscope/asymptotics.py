"""Limsup/liminf estimation at infinity and the sublinear mean functionals.

A limsup at infinity has no finite witness, so it is approximated by the
max of per-window suprema over geometrically growing windows, together
with a stabilization flag (the last three window sups agreeing within
tolerance).  Geometric windows suit both additive tails and log-periodic
structure.

On top of that sit the functionals of the mean lattice:

* ``upper_M1`` -- the uniform window mean
  ``lim_theta limsup_x (1/theta) int_x^{x+theta} f`` (additive side).
  The outer limit exists because ``theta -> theta * limsup_x U_theta f``
  is subadditive, so the normalized values converge and their minimum
  over the schedule is a certified upper bound for the limit.
* ``upper_L1`` -- the log-density mean
  ``lim_theta limsup_x (1/log theta) int_x^{theta x} f(t) dt/t``
  (multiplicative side), either evaluated directly or transported to the
  additive side by the exponential change of variables (the two are equal
  by substitution).
* ``upper_single`` -- limsup of a k-fold averaging-operator image
  (running-mean iterates on the multiplicative side, gamma-kernel
  exponential iterates on the additive side).
* ``upper_tower_limit`` -- the decreasing tower limit over k, with a
  geometric-tail stopping rule and explicit decay-bound termination.

Iterated operator images carry a start-up transient near the domain
origin (the averaging window still overlaps the boundary).  Estimation
windows for order-k iterates are therefore pushed out so the tail half
starts past position ``2k + 4`` (in log coordinates on the multiplicative
side) and, for log-periodic structure, spans at least a full period of
``2 pi`` in log x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import gammaln

from .funcspace import (BoundedFunction, ConjugationDirection,
                        DomainMismatchError, DomainTag, SmoothnessHint,
                        conjugate_W)
from .operators import OperatorKind, antiderivative_of, iterate
from .quadrature import QuadratureConfig

__all__ = [
    "WindowSchedule",
    "ThetaSchedule",
    "LimsupEstimate",
    "FunctionalValue",
    "TowerResult",
    "estimate_limits",
    "upper_M1",
    "upper_L1",
    "upper_single",
    "lower_dual",
    "upper_tower_limit",
]

_REFINE_ROUNDS = 2
_REFINE_POINTS = 64
_LOG_ARG_MAX = 690.0   # keep theta * x below float overflow in direct mode
_MIN_TAIL_SPAN = 13.5  # log-x span of the tail half; two 2*pi periods, so
                       # the running tail max provably settles for
                       # log-periodic structure


@dataclass(frozen=True)
class WindowSchedule:
    """Geometric windows ``[x_start * growth^j, x_start * growth^{j+1})``."""

    x_start: float = 10.0
    growth: float = 1.5
    window_count: int = 24
    samples_per_window: int = 512
    stabilization_tol: float = 1e-3

    def __post_init__(self) -> None:
        if self.x_start <= 0:
            raise ValueError("x_start must be positive")
        if self.growth <= 1:
            raise ValueError("window growth must exceed 1")
        if self.window_count < 2 or self.samples_per_window < 2:
            raise ValueError("window and sample counts must be at least 2")
        if self.stabilization_tol <= 0:
            raise ValueError("stabilization tolerance must be positive")

    @property
    def x_max(self) -> float:
        return self.x_start * self.growth ** self.window_count


@dataclass(frozen=True)
class ThetaSchedule:
    """Geometric ladder for the outer window-width limit."""

    theta_start: float = 1.0
    growth: float = 2.0
    max_steps: int = 16
    stabilization_tol: float = 1e-3

    def __post_init__(self) -> None:
        if self.theta_start <= 0:
            raise ValueError("theta_start must be positive")
        if self.growth <= 1:
            raise ValueError("theta growth must exceed 1")
        if self.max_steps < 2:
            raise ValueError("max_steps must be at least 2")
        if self.stabilization_tol <= 0:
            raise ValueError("stabilization tolerance must be positive")


@dataclass
class LimsupEstimate:
    """Paired upper/lower asymptotic estimates with their window trace."""

    upper: float
    lower: float
    window_sups: list
    window_infs: list
    converged: bool
    stabilization_delta: float


@dataclass
class FunctionalValue:
    """A functional estimate with its stabilization flag and trace."""

    value: float
    stabilized: bool
    info: dict

    def __float__(self) -> float:
        return self.value


@dataclass
class TowerResult:
    """Limit of a decreasing tower of limsup values."""

    value: float
    k_used: int
    stabilized: bool
    levels: list

    def __float__(self) -> float:
        return self.value


def _window_extrema(ev, lo: float, hi: float, samples: int, log_space: bool):
    """Sup and inf of ``ev`` over ``[lo, hi)`` by sampling plus refinement."""
    def grid(a, b, n):
        if log_space:
            return np.exp(np.linspace(math.log(a), math.log(b), n,
                                      endpoint=False))
        return np.linspace(a, b, n, endpoint=False)

    xs = grid(lo, hi, samples)
    vals = np.asarray(ev(xs), dtype=float)
    best_max = float(vals.max())
    best_min = float(vals.min())
    for which in ("max", "min"):
        pts, vl = xs, vals
        for _ in range(_REFINE_ROUNDS):
            i = int(np.argmax(vl) if which == "max" else np.argmin(vl))
            a = pts[max(i - 1, 0)]
            b = pts[min(i + 1, len(pts) - 1)]
            if b <= a:
                break
            pts = grid(a, b, _REFINE_POINTS)
            vl = np.asarray(ev(pts), dtype=float)
            if which == "max":
                best_max = max(best_max, float(vl.max()))
            else:
                best_min = min(best_min, float(vl.min()))
    return best_max, best_min


def estimate_limits(g: BoundedFunction,
                    schedule: WindowSchedule | None = None) -> LimsupEstimate:
    """Windowed limsup/liminf estimates for a bounded function.

    ``upper`` is the max of per-window sups over the tail half of the
    windows (``lower`` symmetric via infs); the estimate is flagged
    converged when the last three window sups and infs each agree within
    the schedule tolerance.  Non-stabilizing inputs are never an error:
    they come back flagged, because divergence is a legitimate verdict.
    """
    schedule = schedule or WindowSchedule()
    log_space = g.domain is DomainTag.MULTIPLICATIVE
    sups: list[float] = []
    infs: list[float] = []
    for j in range(schedule.window_count):
        lo = schedule.x_start * schedule.growth ** j
        hi = lo * schedule.growth
        s, i = _window_extrema(g.evaluate, lo, hi,
                               schedule.samples_per_window, log_space)
        sups.append(s)
        infs.append(i)
    tail = schedule.window_count // 2
    upper = max(sups[tail:])
    lower = min(infs[tail:])
    # Stabilization compares the running tail extrema at the last three
    # windows (did the answer stop moving?), not the raw per-window sups:
    # sub-period windows of a log-periodic function never equalize, yet
    # the estimate itself settles.
    run_max = np.maximum.accumulate(np.array(sups[tail:]))
    run_min = np.minimum.accumulate(np.array(infs[tail:]))
    if len(run_max) >= 3:
        delta = max(float(run_max[-1] - run_max[-3]),
                    float(run_min[-3] - run_min[-1]))
    else:
        delta = math.inf
    return LimsupEstimate(upper=upper, lower=lower, window_sups=sups,
                          window_infs=infs,
                          converged=bool(delta <= schedule.stabilization_tol),
                          stabilization_delta=float(delta))


def _theta_ladder(thetas: ThetaSchedule, cap: float | None = None):
    vals = []
    for j in range(thetas.max_steps):
        th = thetas.theta_start * thetas.growth ** j
        if cap is not None and th > cap:
            break
        vals.append(th)
    return vals


def _ladder_value(values: list, tol: float):
    """Ladder estimate: the minimum over the schedule, plus a flat-end flag.

    The whole ladder is always evaluated: geometric ladders can resonate
    with log-periodic structure and produce short runs of spuriously
    agreeing values far from the limit, so early agreement is never
    trusted.  Because ``theta * (inner limsup)`` is subadditive, the outer
    limit equals the infimum over theta, so the minimum over the computed
    ladder is both a certified upper bound and the best available
    estimate.  The flag reports whether the ladder was flat at its end.
    """
    j = int(np.argmin(np.asarray(values)))
    flat = abs(values[-1] - values[-2]) <= tol
    return j, min(values), flat


def upper_M1(f: BoundedFunction, thetas: ThetaSchedule | None = None,
             windows: WindowSchedule | None = None,
             quad: QuadratureConfig | None = None) -> FunctionalValue:
    """Upper uniform window mean on the additive half-line."""
    if f.domain is not DomainTag.ADDITIVE:
        raise DomainMismatchError("upper_M1 needs an additive-domain function")
    thetas = thetas or ThetaSchedule()
    windows = windows or WindowSchedule()
    quad = quad or QuadratureConfig()
    from .operators import window_average
    ladder = _theta_ladder(thetas)
    values: list[float] = []
    ests = []
    for th in ladder:
        est = estimate_limits(window_average(f, th, quad), windows)
        values.append(est.upper)
        ests.append(est)
    j, value, flat = _ladder_value(values, thetas.stabilization_tol)
    return FunctionalValue(
        value=value,
        stabilized=bool(flat and ests[j].converged),
        info={"thetas": ladder, "values": values,
              "certified_upper": value, "windows": ests[j]})


def upper_L1(f: BoundedFunction, thetas: ThetaSchedule | None = None,
             windows: WindowSchedule | None = None,
             quad: QuadratureConfig | None = None,
             mode: str = "direct") -> FunctionalValue:
    """Upper log-density mean on the multiplicative half-line.

    ``mode="direct"`` evaluates the defining double limit with the ladder
    interpreted in ``log theta`` (the defining normalizer), capped so that
    ``theta * x`` stays below float overflow; ``mode="via_w"`` transports
    the function to the additive side and evaluates the window mean there.
    """
    if f.domain is not DomainTag.MULTIPLICATIVE:
        raise DomainMismatchError("upper_L1 needs a multiplicative-domain "
                                  "function")
    if mode not in ("direct", "via_w"):
        raise ValueError(f"unknown L1 mode {mode!r}")
    thetas = thetas or ThetaSchedule()
    windows = windows or WindowSchedule()
    quad = quad or QuadratureConfig()
    if mode == "via_w":
        res = upper_M1(conjugate_W(f, ConjugationDirection.TO_ADDITIVE),
                       thetas, windows, quad)
        res.info["mode"] = "via_w"
        return res
    G = antiderivative_of(f, quad, "log")
    windows = _adjusted_windows(windows, DomainTag.MULTIPLICATIVE, 1)
    cap = _LOG_ARG_MAX - math.log(windows.x_max) - 2.0
    ladder = _theta_ladder(thetas, cap=cap)
    capped = len(ladder) < thetas.max_steps
    values: list[float] = []
    ests = []
    for lam in ladder:
        factor = math.exp(lam)

        def ev(x, _G=G, _lam=lam, _c=factor):
            xv = np.asarray(x, dtype=float)
            return (np.asarray(_G(xv * _c), dtype=float)
                    - np.asarray(_G(xv), dtype=float)) / _lam

        g = BoundedFunction(label=f"logwindow[{lam:g}]({f.label})",
                            domain=DomainTag.MULTIPLICATIVE, evaluate=ev,
                            bound=f.bound,
                            smoothness_hint=SmoothnessHint.SMOOTH)
        est = estimate_limits(g, windows)
        values.append(est.upper)
        ests.append(est)
    j, value, flat = _ladder_value(values, thetas.stabilization_tol)
    stabilized = bool(flat and ests[j].converged)
    return FunctionalValue(
        value=value, stabilized=stabilized,
        info={"mode": "direct", "log_thetas": ladder,
              "values": values, "certified_upper": value,
              "capped": capped, "windows": ests[j]})


def _adjusted_windows(ws: WindowSchedule, domain: DomainTag,
                      order: int) -> WindowSchedule:
    """Push estimation windows past the order-k start-up transient."""
    half = ws.window_count // 2
    if domain is DomainTag.ADDITIVE:
        need = 2.0 * order + 4.0
        tail_start = ws.x_start * ws.growth ** half
        if tail_start >= need:
            return ws
        return replace(ws, x_start=ws.x_start * need / tail_start)
    span = (ws.window_count - half) * math.log(ws.growth)
    growth = ws.growth
    if span < _MIN_TAIL_SPAN:
        growth = math.exp(_MIN_TAIL_SPAN / (ws.window_count - half))
    need = 2.0 * order + 4.0
    tail_start_log = math.log(ws.x_start) + half * math.log(growth)
    x_start = ws.x_start
    if tail_start_log < need:
        x_start = math.exp(need - half * math.log(growth))
    if growth == ws.growth and x_start == ws.x_start:
        return ws
    return replace(ws, growth=growth, x_start=x_start)


def upper_single(f: BoundedFunction, kind: str, k: int = 1,
                 windows: WindowSchedule | None = None,
                 quad: QuadratureConfig | None = None) -> FunctionalValue:
    """Limsup of the k-fold averaging-operator image of f.

    ``kind="cesaro"`` gives the k-fold running mean (k=1 is the plain
    Cesaro limsup), ``kind="exp"`` the k-fold exponential mean (k=1 is
    the Abel-type limsup).
    """
    if kind not in ("cesaro", "exp"):
        raise ValueError(f"unknown functional kind {kind!r}")
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ValueError("iterate order must be an integer >= 1")
    windows = windows or WindowSchedule()
    quad = quad or QuadratureConfig()
    op = OperatorKind.cesaro() if kind == "cesaro" else OperatorKind.exp()
    image = iterate(f, op, int(k), quad)
    ws = _adjusted_windows(windows, image.domain, int(k))
    est = estimate_limits(image, ws)
    return FunctionalValue(value=est.upper, stabilized=est.converged,
                           info={"estimate": est, "windows": ws,
                                 "kind": kind, "order": int(k)})


def lower_dual(upper, f: BoundedFunction, *args, **kwargs):
    """Lower counterpart of any upper functional: ``-upper(-f)``."""
    res = upper(-f, *args, **kwargs)
    if isinstance(res, TowerResult):
        return TowerResult(value=-res.value, k_used=res.k_used,
                           stabilized=res.stabilized,
                           levels=[-v for v in res.levels])
    return FunctionalValue(value=-res.value, stabilized=res.stabilized,
                           info={"dual_of": res.info})


def _apriori_step_bound(k: int, bound: float) -> float:
    # 2 e^{-k} k^k / k! * bound, computed in log space
    return 2.0 * math.exp(-k + k * math.log(k) - gammaln(k + 1)) * bound


def upper_tower_limit(f: BoundedFunction, kind: str, tol: float,
                      k_max: int = 24,
                      windows: WindowSchedule | None = None,
                      quad: QuadratureConfig | None = None) -> TowerResult:
    """Limit of the decreasing tower ``k -> upper_single(f, kind, k)``.

    The raw stop rule (successive levels within tol) underestimates the
    remaining tail for geometric towers, so stopping also requires the
    estimated tail ``|d_k| r / (1 - r)`` (ratio from the last two
    differences) to be within tol, and the returned value removes that
    tail by Aitken extrapolation when the ratio is well defined.  The
    explicit decay bound ``2 e^{-k} k^k / k! * bound`` of the exponential
    iterates (Stirling: ~ ``2 / sqrt(2 pi k)``) also terminates, for
    either tower (the running-mean tower is the conjugated image of the
    exponential one).
    """
    if kind not in ("cesaro", "exp"):
        raise ValueError(f"unknown tower kind {kind!r}")
    if tol <= 0:
        raise ValueError("tower tolerance must be positive")
    levels: list[float] = []
    for k in range(1, k_max + 1):
        levels.append(upper_single(f, kind, k, windows, quad).value)
        if len(levels) >= 2:
            d = levels[-2] - levels[-1]
            if len(levels) == 2 and abs(d) <= max(1e-12, 1e-2 * tol):
                return TowerResult(value=levels[-1], k_used=1,
                                   stabilized=True, levels=levels)
            if len(levels) >= 3:
                d_prev = levels[-3] - levels[-2]
                r = 0.0
                if abs(d_prev) > 1e-14:
                    r = min(abs(d) / abs(d_prev), 0.9)
                tail = abs(d) * r / (1.0 - r)
                if abs(d) <= tol and tail <= tol:
                    value = levels[-1]
                    den = d_prev - d
                    if abs(den) > 0.2 * abs(d_prev) > 0:
                        aitken = levels[-1] - d * d / den
                        if levels[-1] - 3.0 * tail - tol <= aitken \
                                <= levels[-1] + tol:
                            value = aitken
                        elif d > 0:
                            value = levels[-1] - tail
                    elif d > 0:
                        value = levels[-1] - tail
                    return TowerResult(value=value, k_used=len(levels) - 1,
                                       stabilized=True, levels=levels)
        if _apriori_step_bound(k, f.bound) <= tol:
            return TowerResult(value=levels[-1], k_used=k, stabilized=True,
                               levels=levels)
    return TowerResult(value=levels[-1], k_used=k_max, stabilized=False,
                       levels=levels)
