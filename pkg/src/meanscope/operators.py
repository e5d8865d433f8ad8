"""Averaging transforms: sliding window, exponential, and running means.

Three linear operators act on bounded half-line functions:

* ``window_average``: the sliding mean ``(1/theta) int_x^{x+theta} f``
  (additive domain),
* ``exp_average``: the exponentially weighted mean
  ``e^{-x} int_0^x f(t) e^t dt`` (additive domain),
* ``cesaro_average``: the running mean ``(1/x) int_1^x f`` (multiplicative
  domain).

The exponential mean is never evaluated in its literal form: for large x
that expression multiplies ``e^{-x}`` against an ``e^x``-sized integral and
loses every digit.  Substituting ``t -> x - t`` gives the identical
convolution ``int_0^x f(x-t) e^{-t} dt``, which is what this module
computes.  The n-fold exponential mean collapses, by the same induction
that proves associativity of convolution (with boundary terms kept, since
we work at finite x), to a single convolution against the order-n gamma
kernel ``e^{-t} t^{n-1}/(n-1)!`` -- so iterating it costs one quadrature,
not n nested ones.  A genuinely nested implementation is kept as a test
oracle.

Piecewise-constant inputs never go through sampled quadrature: their
convolutions are exact sums of incomplete-gamma differences over the
pieces, and their running means are exact interval arithmetic.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammainc, gammaincc, gammaln

from .funcspace import (BoundedFunction, DomainMismatchError, DomainTag,
                        SmoothnessHint)
from .quadrature import PanelTable, Antiderivative, QuadratureConfig, gauss_legendre

__all__ = [
    "TAIL_MASS",
    "GammaKernel",
    "OperatorKind",
    "gamma_kernel_eval",
    "window_average",
    "exp_average",
    "exp_average_via_kernel",
    "exp_average_nested",
    "cesaro_average",
    "iterate",
    "lipschitz_decompose_check",
    "antiderivative_of",
]

TAIL_MASS = 1e-12          # kernel mass allowed beyond the tail cut
_EXP_TAIL = -math.log(TAIL_MASS)
_NESTED_TAIL = -math.log(1e-16)
_GEOM_RATIO = math.exp(0.125)  # multiplicative panel ratio
_lock = threading.RLock()


# ---------------------------------------------------------------------------
# Gamma kernels
# ---------------------------------------------------------------------------

def _find_tail_cut(n: int) -> float:
    """Smallest T with upper tail mass Q(n, T) <= TAIL_MASS, by bisection."""
    lo = float(n)
    hi = float(n + 40.0 * math.sqrt(n) + 60.0)
    if gammaincc(n, lo) <= TAIL_MASS:
        lo = 0.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if gammaincc(n, mid) <= TAIL_MASS:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class GammaKernel:
    """Order-n convolution kernel ``e^{-x} x^{n-1}/(n-1)!`` on ``x >= 0``."""

    order: int
    tail_cut: float

    @classmethod
    def of_order(cls, n: int) -> "GammaKernel":
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise ValueError("kernel order must be an integer >= 1")
        with _lock:
            kern = _kernel_cache.get(int(n))
            if kern is None:
                kern = cls(int(n), _find_tail_cut(int(n)))
                _kernel_cache[int(n)] = kern
        return kern

    def __call__(self, x):
        xv = np.asarray(x, dtype=float)
        arr = np.atleast_1d(xv)
        out = np.zeros(arr.shape)
        pos = arr > 0
        n = self.order
        if n == 1:
            out[pos] = np.exp(-arr[pos])
            out[arr == 0] = 1.0
        else:
            # log-space evaluation avoids overflow of x**(n-1) for large n
            out[pos] = np.exp(-arr[pos] + (n - 1) * np.log(arr[pos])
                              - gammaln(n))
        return float(out[0]) if xv.ndim == 0 else out.reshape(xv.shape)

    def mass(self, a, b):
        """Exact kernel mass over ``[a, b]`` (clipped to the half-line)."""
        a = np.maximum(np.asarray(a, dtype=float), 0.0)
        b = np.maximum(np.asarray(b, dtype=float), 0.0)
        return gammainc(self.order, b) - gammainc(self.order, a)


_kernel_cache: dict[int, GammaKernel] = {}


def gamma_kernel_eval(n: int, x):
    """Value of the order-n gamma kernel; zero for negative arguments."""
    return GammaKernel.of_order(n)(x)


# ---------------------------------------------------------------------------
# Operator kinds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OperatorKind:
    """Which averaging transform to apply (window needs its width)."""

    variant: str               # "window" | "exp" | "cesaro"
    theta: Optional[float] = None

    def __post_init__(self) -> None:
        if self.variant not in ("window", "exp", "cesaro"):
            raise ValueError(f"unknown operator kind {self.variant!r}")
        if self.variant == "window":
            if self.theta is None or self.theta <= 0:
                raise ValueError("window averaging needs theta > 0")
        elif self.theta is not None:
            raise ValueError(f"{self.variant} takes no theta")

    @classmethod
    def window(cls, theta: float) -> "OperatorKind":
        return cls("window", float(theta))

    @classmethod
    def exp(cls) -> "OperatorKind":
        return cls("exp")

    @classmethod
    def cesaro(cls) -> "OperatorKind":
        return cls("cesaro")

    @property
    def domain(self) -> DomainTag:
        return (DomainTag.MULTIPLICATIVE if self.variant == "cesaro"
                else DomainTag.ADDITIVE)


def _require_domain(f: BoundedFunction, tag: DomainTag, what: str) -> None:
    if f.domain is not tag:
        raise DomainMismatchError(f"{what} needs a {tag.value}-domain function")


# ---------------------------------------------------------------------------
# Antiderivative resolver
# ---------------------------------------------------------------------------

def antiderivative_of(f: BoundedFunction, cfg: QuadratureConfig,
                      mode: str = "plain"):
    """Callable cumulative integral of ``f`` from its domain start.

    ``mode="plain"`` accumulates ``f(t) dt``; ``mode="log"`` accumulates
    ``f(t) dt/t`` and requires the multiplicative domain.  Resolution
    prefers, in order: a cached resolution, an exact structural hint
    attached by whichever operator built ``f``, linearity over tracked
    parts, exact piecewise arithmetic, and finally an adaptive panel table.
    """
    if mode not in ("plain", "log"):
        raise ValueError(f"unknown antiderivative mode {mode!r}")
    if mode == "log" and f.domain is not DomainTag.MULTIPLICATIVE:
        raise DomainMismatchError("log-measure antiderivative needs the "
                                  "multiplicative domain")
    with _lock:
        cache = f.hints.setdefault("_anti_cache", {})
        hit = cache.get((mode, cfg))
        if hit is not None:
            return hit
    hint = f.hints.get("anti_plain" if mode == "plain" else "anti_log")
    if hint is not None:
        F = hint(cfg, antiderivative_of)
    elif "parts" in f.hints:
        resolved = tuple((c, antiderivative_of(atom, cfg, mode))
                         for c, atom in f.hints["parts"])

        def F(x, _r=resolved):
            acc = None
            for c, Fi in _r:
                v = c * np.asarray(Fi(x), dtype=float)
                acc = v if acc is None else acc + v
            return acc
    else:
        spacing = (("uniform", 1.0) if f.domain is DomainTag.ADDITIVE
                   else ("geometric", _GEOM_RATIO))
        F = Antiderivative(f.evaluate, f.domain.start, cfg, spacing,
                           breakpoints=f.breakpoints,
                           piecewise_constant=f.piecewise_constant,
                           mode=mode)
    with _lock:
        cache[(mode, cfg)] = F
    return F


# ---------------------------------------------------------------------------
# Half-line convolution backends
# ---------------------------------------------------------------------------

_CHUNK_BUDGET = 2_000_000  # cap on points evaluated per vectorized block


def _convolve_smooth(g_eval, xv, kernel, T, panel_len, order):
    """``int_0^{min(x, T)} g(x - t) kernel(t) dt`` for an array of x."""
    nodes, weights = gauss_legendre(order)
    out = np.zeros(xv.shape)
    m = max(1, int(math.ceil(T / panel_len)))
    big = xv >= T
    if np.any(big):
        edges = np.linspace(0.0, T, m + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        t = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
        wk = (half[:, None] * weights[None, :]).ravel() * kernel(t)
        xb = xv[big]
        res = np.empty(xb.shape)
        rows = max(1, _CHUNK_BUDGET // t.size)
        for i in range(0, xb.size, rows):
            blk = xb[i:i + rows]
            vals = np.asarray(g_eval((blk[:, None] - t[None, :]).ravel()),
                              dtype=float).reshape(blk.size, t.size)
            res[i:i + rows] = vals @ wk
        out[big] = res
    small = ~big
    if np.any(small):
        xs = xv[small]
        u_edges = np.linspace(0.0, 1.0, m + 1)
        uh = 0.5 * np.diff(u_edges)
        um = 0.5 * (u_edges[:-1] + u_edges[1:])
        u = (um[:, None] + uh[:, None] * nodes[None, :]).ravel()
        wu = (uh[:, None] * weights[None, :]).ravel()
        res = np.empty(xs.shape)
        rows = max(1, _CHUNK_BUDGET // u.size)
        for i in range(0, xs.size, rows):
            blk = xs[i:i + rows]
            t = blk[:, None] * u[None, :]
            vals = np.asarray(g_eval((blk[:, None] - t).ravel()),
                              dtype=float).reshape(t.shape)
            res[i:i + rows] = (vals * kernel(t) * wu[None, :]).sum(axis=1) * blk
        out[small] = res
    return out


def _convolve_pc(f, xv, kernel_cdf, T):
    """Exact convolution of a piecewise-constant f by piece arithmetic.

    Each piece ``[a, b)`` of f inside the kernel window contributes
    ``value * (K(x - a) - K(max(x - b, 0)))`` where K is the kernel's
    cumulative mass.  Pieces past the tail cut are dropped (mass below
    TAIL_MASS).
    """
    start = f.domain.start
    x_min = float(xv.min())
    x_max = float(xv.max())
    lo0 = max(start, x_min - T - 2.0)
    bps = np.asarray(f.breakpoints(lo0, x_max + 1.0), dtype=float)
    edges = np.unique(np.concatenate(([lo0], bps, [x_max + 1.0])))
    mids = 0.5 * (edges[:-1] + edges[1:])
    vals = np.asarray(f.evaluate(mids), dtype=float)
    idx = np.searchsorted(edges, xv, side="right") - 1
    idx = np.clip(idx, 0, len(edges) - 2)
    acc = np.zeros(xv.shape)
    active = np.ones(xv.shape, dtype=bool)
    offset = 0
    while np.any(active) and offset < len(edges):
        j = idx - offset
        sel = active & (j >= 0)
        if not np.any(sel):
            break
        js = j[sel]
        ta = xv[sel] - edges[js]
        tb = np.maximum(xv[sel] - edges[js + 1], 0.0)
        acc[sel] += vals[js] * (kernel_cdf(np.maximum(ta, 0.0)) - kernel_cdf(tb))
        done = np.zeros(xv.shape, dtype=bool)
        done[sel] = tb >= T
        active &= ~done
        active &= (idx - offset) >= 0
        offset += 1
    return acc


def _vector_wrap(core):
    def ev(x):
        arr = np.asarray(x, dtype=float)
        out = core(np.atleast_1d(arr).ravel().astype(float))
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)
    return ev


def _distribute(op, f: BoundedFunction):
    """Apply a linear operator part-by-part when f is a tracked combination."""
    parts = f.hints.get("parts")
    if parts is None:
        return None
    total = None
    for c, atom in parts:
        g = c * op(atom)
        total = g if total is None else total + g
    return total


# ---------------------------------------------------------------------------
# The operators
# ---------------------------------------------------------------------------

def window_average(f: BoundedFunction, theta: float,
                   quad: QuadratureConfig | None = None) -> BoundedFunction:
    """Sliding mean over ``[x, x + theta]``; uniformly continuous output."""
    _require_domain(f, DomainTag.ADDITIVE, "window averaging")
    theta = float(theta)
    if theta <= 0:
        raise ValueError("theta must be positive")
    quad = quad or QuadratureConfig()
    F = antiderivative_of(f, quad, "plain")

    def core(xv, _F=F, _t=theta):
        return (np.asarray(_F(xv + _t), dtype=float)
                - np.asarray(_F(xv), dtype=float)) / _t

    def deriv(x, _f=f.evaluate, _t=theta):
        xv = np.asarray(x, dtype=float)
        return (np.asarray(_f(xv + _t), dtype=float)
                - np.asarray(_f(xv), dtype=float)) / _t

    return BoundedFunction(
        label=f"window[{theta:g}]({f.label})", domain=DomainTag.ADDITIVE,
        evaluate=_vector_wrap(core), bound=f.bound,
        smoothness_hint=SmoothnessHint.SMOOTH, derivative=deriv)


def _exp_like(f: BoundedFunction, quad: QuadratureConfig, kernel, kernel_cdf,
              T: float):
    """Shared evaluate-closure construction for exponential-type kernels."""
    if f.piecewise_constant:
        core = lambda xv: _convolve_pc(f, xv, kernel_cdf, T)
    else:
        core = lambda xv: _convolve_smooth(f.evaluate, xv, kernel, T, 2.0,
                                           quad.order)
    return _vector_wrap(core)


def exp_average(f: BoundedFunction,
                quad: QuadratureConfig | None = None) -> BoundedFunction:
    """Exponentially weighted mean, evaluated in the stable convolved form."""
    _require_domain(f, DomainTag.ADDITIVE, "exponential averaging")
    quad = quad or QuadratureConfig()
    out = _distribute(lambda a: exp_average(a, quad), f)
    if out is not None:
        return out
    ev = _exp_like(f, quad, lambda t: np.exp(-t),
                   lambda t: -np.expm1(-t), _EXP_TAIL)

    def anti_plain(cfg, resolve, _f=f, _ev=ev):
        F = resolve(_f, cfg, "plain")
        # d/dx of the mean is f minus the mean, so its cumulative is F - Sf
        return lambda x: np.asarray(F(x), dtype=float) - np.asarray(_ev(x), dtype=float)

    def deriv(x, _f=f.evaluate, _ev=ev):
        return (np.asarray(_f(x), dtype=float)
                - np.asarray(_ev(x), dtype=float))

    smooth = (SmoothnessHint.SMOOTH
              if f.smoothness_hint is SmoothnessHint.SMOOTH
              else SmoothnessHint.UNKNOWN)
    return BoundedFunction(
        label=f"exp_avg({f.label})", domain=DomainTag.ADDITIVE, evaluate=ev,
        bound=f.bound, smoothness_hint=smooth, derivative=deriv,
        hints={"anti_plain": anti_plain})


def exp_average_via_kernel(f: BoundedFunction, n: int,
                           quad: QuadratureConfig | None = None) -> BoundedFunction:
    """n-fold exponential mean as one convolution against the gamma kernel."""
    _require_domain(f, DomainTag.ADDITIVE, "exponential averaging")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError("kernel order must be an integer >= 1")
    quad = quad or QuadratureConfig()
    out = _distribute(lambda a: exp_average_via_kernel(a, n, quad), f)
    if out is not None:
        return out
    evs = []
    for j in range(1, n + 1):
        kern = GammaKernel.of_order(j)
        evs.append(_exp_like(f, quad, kern,
                             lambda t, _k=kern: _k.mass(0.0, t),
                             kern.tail_cut))
    ev = evs[-1]
    prev = f.evaluate if n == 1 else evs[-2]

    def anti_plain(cfg, resolve, _f=f, _evs=tuple(evs)):
        F = resolve(_f, cfg, "plain")

        def anti(x):
            acc = np.asarray(F(x), dtype=float).copy()
            for e in _evs:
                acc -= np.asarray(e(x), dtype=float)
            return acc
        return anti

    def deriv(x, _p=prev, _e=ev):
        return (np.asarray(_p(x), dtype=float)
                - np.asarray(_e(x), dtype=float))

    smooth = (SmoothnessHint.SMOOTH
              if f.smoothness_hint is SmoothnessHint.SMOOTH
              else SmoothnessHint.UNKNOWN)
    return BoundedFunction(
        label=f"exp_avg^{n}({f.label})", domain=DomainTag.ADDITIVE,
        evaluate=ev, bound=f.bound, smoothness_hint=smooth, derivative=deriv,
        hints={"anti_plain": anti_plain})


def exp_average_nested(f: BoundedFunction, n: int,
                       quad: QuadratureConfig | None = None) -> BoundedFunction:
    """Reference implementation: literally nest the one-step mean n times.

    Each level integrates a panel tabulation of the previous level, so the
    gamma-kernel shortcut is never consulted.  Kept as an independent
    oracle for the kernel path; smooth inputs only.
    """
    _require_domain(f, DomainTag.ADDITIVE, "exponential averaging")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError("nesting depth must be an integer >= 1")
    if f.breakpoints is not None:
        raise ValueError("nested oracle supports breakpoint-free inputs only")
    quad = quad or QuadratureConfig()

    def step(g_eval):
        return lambda xv: _convolve_smooth(g_eval, xv, lambda t: np.exp(-t),
                                           _NESTED_TAIL, 0.5, quad.order)

    prev = f.evaluate
    for _ in range(n - 1):
        table = PanelTable(step(prev), 0.0, ("uniform", 0.25))
        prev = table
    ev = _vector_wrap(step(prev))
    return BoundedFunction(
        label=f"exp_nested^{n}({f.label})", domain=DomainTag.ADDITIVE,
        evaluate=ev, bound=f.bound, smoothness_hint=SmoothnessHint.SMOOTH)


def cesaro_average(f: BoundedFunction,
                   quad: QuadratureConfig | None = None) -> BoundedFunction:
    """Running mean ``(1/x) int_1^x f``; the value at x=1 is ``f(1)``."""
    _require_domain(f, DomainTag.MULTIPLICATIVE, "running-mean averaging")
    quad = quad or QuadratureConfig()
    out = _distribute(lambda a: cesaro_average(a, quad), f)
    if out is not None:
        return out
    F = antiderivative_of(f, quad, "plain")
    f1 = float(np.asarray(f.evaluate(1.0), dtype=float))

    def core(xv, _F=F, _f1=f1):
        vals = np.asarray(_F(np.maximum(xv, 1.0)), dtype=float) / xv
        return np.where(xv == 1.0, _f1, vals)

    ev = _vector_wrap(core)

    def anti_log(cfg, resolve, _f=f, _F=F):
        G = resolve(_f, cfg, "log")

        def anti(x):
            xv = np.asarray(x, dtype=float)
            return (np.asarray(G(xv), dtype=float)
                    - np.asarray(_F(np.maximum(xv, 1.0)), dtype=float) / xv)
        return anti

    def deriv(x, _f=f.evaluate, _ev=ev):
        xv = np.asarray(x, dtype=float)
        return (np.asarray(_f(xv), dtype=float)
                - np.asarray(_ev(xv), dtype=float)) / xv

    smooth = (SmoothnessHint.SMOOTH
              if f.smoothness_hint is SmoothnessHint.SMOOTH
              else SmoothnessHint.UNKNOWN)
    return BoundedFunction(
        label=f"cesaro({f.label})", domain=DomainTag.MULTIPLICATIVE,
        evaluate=ev, bound=f.bound, smoothness_hint=smooth, derivative=deriv,
        hints={"anti_log": anti_log})


def _cesaro_tables(f: BoundedFunction, quad: QuadratureConfig,
                   upto: int) -> list[PanelTable]:
    """Panel tables of the running-mean iterates 1..upto (cached on f)."""
    with _lock:
        cache = f.hints.setdefault("_cesaro_tables", {})
        tables = cache.setdefault(quad, [])
    F = antiderivative_of(f, quad, "plain")
    with _lock:
        while len(tables) < upto:
            if not tables:
                def builder(x, _F=F):
                    xv = np.asarray(x, dtype=float)
                    return np.asarray(_F(np.maximum(xv, 1.0)), dtype=float) / xv
            else:
                def builder(x, _p=tables[-1]):
                    xv = np.asarray(x, dtype=float)
                    return np.asarray(_p.integral_to(np.maximum(xv, 1.0)),
                                      dtype=float) / xv
            tables.append(PanelTable(builder, 1.0, ("geometric", _GEOM_RATIO),
                                     breakpoints=f.breakpoints))
    return tables


def _cesaro_iterate(f: BoundedFunction, k: int,
                    quad: QuadratureConfig) -> BoundedFunction:
    out = _distribute(lambda a: _cesaro_iterate(a, k, quad), f)
    if out is not None:
        return out
    tables = _cesaro_tables(f, quad, k - 1)
    last = tables[k - 2]
    f1 = float(np.asarray(f.evaluate(1.0), dtype=float))

    def core(xv, _t=last, _f1=f1):
        vals = np.asarray(_t.integral_to(np.maximum(xv, 1.0)), dtype=float) / xv
        return np.where(xv == 1.0, _f1, vals)

    ev = _vector_wrap(core)
    level_evs = [tables[j] for j in range(k - 1)] + [ev]

    def anti_log(cfg, resolve, _f=f, _levels=tuple(level_evs)):
        G = resolve(_f, cfg, "log")

        def anti(x):
            xv = np.asarray(x, dtype=float)
            acc = np.asarray(G(xv), dtype=float).copy()
            for e in _levels:
                acc = acc - np.asarray(e(xv), dtype=float)
            return acc
        return anti

    def deriv(x, _p=last, _ev=ev):
        xv = np.asarray(x, dtype=float)
        return (np.asarray(_p(xv), dtype=float)
                - np.asarray(_ev(xv), dtype=float)) / xv

    return BoundedFunction(
        label=f"cesaro^{k}({f.label})", domain=DomainTag.MULTIPLICATIVE,
        evaluate=ev, bound=f.bound,
        smoothness_hint=(SmoothnessHint.SMOOTH
                         if f.smoothness_hint is SmoothnessHint.SMOOTH
                         else SmoothnessHint.UNKNOWN),
        derivative=deriv, hints={"anti_log": anti_log})


def iterate(f: BoundedFunction, kind: OperatorKind, k: int,
            quad: QuadratureConfig | None = None) -> BoundedFunction:
    """k-fold application of an averaging operator (k = 0 returns f).

    Exponential iterates with k >= 2 go through the gamma-kernel
    convolution; running-mean iterates nest panel tabulations.
    """
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise ValueError("iteration count must be a nonnegative integer")
    quad = quad or QuadratureConfig()
    _require_domain(f, kind.domain, f"{kind.variant} iteration")
    if k == 0:
        return f
    if kind.variant == "window":
        g = f
        for _ in range(k):
            g = window_average(g, kind.theta, quad)
        return g
    if kind.variant == "exp":
        if k == 1:
            return exp_average(f, quad)
        return exp_average_via_kernel(f, k, quad)
    if k == 1:
        return cesaro_average(f, quad)
    return _cesaro_iterate(f, k, quad)


def lipschitz_decompose_check(f: BoundedFunction, x: float,
                              quad: QuadratureConfig | None = None) -> float:
    """Residual of reconstructing f from the mean of ``f + f'``.

    A bounded function with bounded derivative satisfies
    ``f(x) = S(f + f')(x) + f(0) e^{-x}`` exactly (integrate
    ``(e^t f)' = e^t (f + f')``), so the returned residual is pure
    quadrature error.
    """
    _require_domain(f, DomainTag.ADDITIVE, "decomposition check")
    if f.derivative is None:
        raise ValueError("decomposition check needs a derivative evaluator")
    quad = quad or QuadratureConfig()
    probe = np.linspace(0.0, max(50.0, float(x) + 10.0), 4096)
    dbound = float(np.max(np.abs(np.asarray(f.derivative(probe),
                                            dtype=float)))) + 1e-9
    df = BoundedFunction(label=f"d({f.label})", domain=DomainTag.ADDITIVE,
                         evaluate=f.derivative, bound=dbound,
                         smoothness_hint=SmoothnessHint.UNKNOWN)
    sg = exp_average(f + df, quad)
    x = float(x)
    f0 = float(np.asarray(f.evaluate(0.0), dtype=float))
    return float(np.asarray(f.evaluate(x), dtype=float)
                 - (float(np.asarray(sg(x), dtype=float)) + f0 * math.exp(-x)))
