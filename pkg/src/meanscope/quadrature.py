"""Deterministic adaptive quadrature engine.

Everything downstream (averaging operators, limsup functionals, verdicts)
rests on three primitives:

* :func:`integrate` -- adaptive composite Gauss-Legendre integration of a
  vectorized integrand over a finite interval, with an embedded error
  estimate (order-n rule against order-2n on the same panel) and
  deterministic bisection.  Node placement depends only on the integrand
  and the config, never on call order, so results are bit-reproducible.
* :class:`Antiderivative` -- a lazily extended cumulative integral
  ``F(x) = int_a^x f`` backed by a panel table.  Differences
  ``F(x + h) - F(x)`` only see the error of the panels inside ``[x, x+h]``
  because the shared prefix cancels exactly.
* :class:`PanelTable` -- piecewise Gauss-Legendre tabulation of a function
  (nodal values per panel, barycentric evaluation, exact partial integrals
  of the interpolant).  Used for nested operator iterates.

Functions that are piecewise constant with known jump locations bypass
sampling entirely: their panel integrals are exact interval arithmetic.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

__all__ = [
    "QuadratureConfig",
    "QuadratureError",
    "integrate",
    "Antiderivative",
    "PanelTable",
    "gauss_legendre",
]

_RULE_ORDERS = {"gl8": 8, "gl16": 16, "gl32": 32}


class QuadratureError(RuntimeError):
    """Adaptive subdivision hit its budget before reaching tolerance."""


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and rule selection for the quadrature engine.

    ``rule`` names the base Gauss-Legendre order; error estimates compare
    the base rule against the doubled order on the same panel.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_subdivisions: int = 2**15
    rule: str = "gl16"

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be strictly positive")
        if self.rule not in _RULE_ORDERS:
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")

    @property
    def order(self) -> int:
        return _RULE_ORDERS[self.rule]


_leggauss_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
_cache_lock = threading.RLock()


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    with _cache_lock:
        if n not in _leggauss_cache:
            nodes, weights = np.polynomial.legendre.leggauss(n)
            _leggauss_cache[n] = (nodes, weights)
        return _leggauss_cache[n]


def _batch_integrals(f, a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Gauss-Legendre order-n integrals over the panels [a_i, b_i]."""
    nodes, weights = gauss_legendre(n)
    half = 0.5 * (b - a)
    pts = (0.5 * (a + b))[:, None] + half[:, None] * nodes[None, :]
    vals = np.asarray(f(pts.ravel()), dtype=float).reshape(pts.shape)
    return half * (vals @ weights)


def integrate(f, a: float, b: float, cfg: QuadratureConfig | None = None,
              breakpoints=()) -> float:
    """Integrate a vectorized real function over ``[a, b]``.

    ``breakpoints`` lists interior points where ``f`` may jump or kink;
    initial panels are split there so that each panel sees a smooth piece.
    Raises :class:`QuadratureError` if the subdivision budget is exhausted
    while some panel still fails its error test.
    """
    cfg = cfg or QuadratureConfig()
    if a == b:
        return 0.0
    if a > b:
        return -integrate(f, b, a, cfg, breakpoints)
    order = cfg.order
    pts = [p for p in sorted(set(float(p) for p in breakpoints)) if a < p < b]
    edges = np.array([a] + pts + [b])
    total_len = b - a
    lo = edges[:-1]
    hi = edges[1:]
    splits = 0
    total = 0.0
    while lo.size:
        coarse = _batch_integrals(f, lo, hi, order)
        fine = _batch_integrals(f, lo, hi, 2 * order)
        err = np.abs(fine - coarse)
        tol = np.maximum(cfg.abs_tol * (hi - lo) / total_len,
                         cfg.rel_tol * np.abs(fine))
        ok = (err <= tol) | ((hi - lo) <= 1e-14 * total_len)
        total += float(fine[ok].sum())
        lo, hi = lo[~ok], hi[~ok]
        if lo.size:
            splits += lo.size
            if splits > cfg.max_subdivisions:
                raise QuadratureError(
                    f"quadrature did not converge on [{lo[0]:.6g}, {hi[0]:.6g}] "
                    f"(budget {cfg.max_subdivisions} subdivisions)")
            mid = 0.5 * (lo + hi)
            lo = np.concatenate((lo, mid))
            hi = np.concatenate((mid, hi))
    return total


def _anchored_grid(origin: float, lo: float, hi: float, kind: str,
                   step: float) -> np.ndarray:
    """Origin-anchored grid points in (lo, hi], padded one panel past hi."""
    if kind == "uniform":
        k0 = int(np.floor((lo - origin) / step)) + 1
        k1 = int(np.ceil((hi - origin) / step)) + 1
        edges = origin + step * np.arange(k0, k1 + 1)
    else:
        logstep = np.log(step)
        k0 = int(np.floor(np.log(lo / origin) / logstep)) + 1
        k1 = int(np.ceil(np.log(hi / origin) / logstep)) + 1
        edges = origin * step ** np.arange(k0, k1 + 1)
    edges = edges[edges > lo * (1 + 1e-15) + 1e-300]
    if edges.size == 0 or edges[-1] < hi:
        last = edges[-1] if edges.size else lo
        extra = last + step if kind == "uniform" else last * step
        edges = np.concatenate((edges, [max(extra, hi)]))
    return edges


def _merge_edges(lo: float, hi: float, base: np.ndarray, breaks) -> np.ndarray:
    """Sorted unique panel edges in (lo, hi]: base grid plus jump points."""
    pieces = [base, np.array([hi])]
    if breaks is not None and len(breaks):
        br = np.asarray(breaks, dtype=float)
        pieces.append(br[(br > lo) & (br < hi)])
    edges = np.unique(np.concatenate(pieces))
    edges = edges[(edges > lo) & (edges <= hi)]
    # Near-duplicate removal must be relative to the local edge magnitude,
    # or geometric grids spanning hundreds of decades lose their panels.
    keep = np.concatenate(
        ([True], np.diff(edges) > 1e-13 * np.maximum(1.0, np.abs(edges[1:]))))
    return edges[keep]


class Antiderivative:
    """Cached cumulative integral of a function on a half-line.

    ``mode`` selects the measure: ``"plain"`` accumulates ``f(t) dt``,
    ``"log"`` accumulates ``f(t) dt/t`` (the dilation-invariant measure on
    ``[1, oo)``).  ``spacing`` is ``("uniform", h)`` for additive domains or
    ``("geometric", ratio)`` for multiplicative ones.

    For piecewise-constant ``f`` (``breakpoints`` given and
    ``piecewise_constant=True``) every panel integral is exact interval
    arithmetic; otherwise panels carry the embedded Gauss-Legendre pair and
    are bisected until each panel meets its error allocation.  The table
    extends lazily and may be queried from multiple threads.
    """

    def __init__(self, f, origin: float, cfg: QuadratureConfig,
                 spacing: tuple[str, float], breakpoints=None,
                 piecewise_constant: bool = False, mode: str = "plain"):
        if mode not in ("plain", "log"):
            raise ValueError(f"unknown antiderivative mode {mode!r}")
        kind, step = spacing
        if kind == "uniform":
            if step <= 0:
                raise ValueError("uniform spacing step must be positive")
        elif kind == "geometric":
            if step <= 1:
                raise ValueError("geometric spacing ratio must exceed 1")
        else:
            raise ValueError(f"unknown spacing kind {kind!r}")
        self._f = f
        self._origin = float(origin)
        self._cfg = cfg
        self._kind = kind
        self._step = float(step)
        self._breakpoints = breakpoints
        self._pc = piecewise_constant
        self._mode = mode
        self._lock = threading.RLock()
        self._knots = np.array([self._origin])
        self._cum = np.array([0.0])
        self._values = np.array([]) if piecewise_constant else None
        self._splits = 0
        self._blocks = 0
        self._block_n = 4096 if kind == "uniform" else 256

    def _block_boundary(self, b: int) -> float:
        # arithmetic mirrors _anchored_grid exactly, so block boundaries
        # land bitwise on grid points
        if self._kind == "uniform":
            return self._origin + self._step * float(self._block_n * b)
        return self._origin * self._step ** float(self._block_n * b)

    def _base_edges(self, lo: float, hi: float) -> np.ndarray:
        # Grid anchored at the origin so cached panels are independent of
        # the order in which the table was extended.
        return _anchored_grid(self._origin, lo, hi, self._kind, self._step)

    def _integrand(self, x):
        vals = np.asarray(self._f(x), dtype=float)
        if self._mode == "log":
            vals = vals / x
        return vals

    def _exact_piece(self, a, b, value):
        if self._mode == "log":
            return value * (np.log(b) - np.log(a))
        return value * (b - a)

    def _refined_panels(self, lo: np.ndarray, hi: np.ndarray):
        """Adaptive batch refinement; returns sorted (edges_hi, integrals)."""
        order = self._cfg.order
        acc_hi: list[np.ndarray] = []
        acc_lo: list[np.ndarray] = []
        acc_int: list[np.ndarray] = []
        tol = np.full(lo.shape, self._cfg.abs_tol)
        while lo.size:
            coarse = _batch_integrals(self._integrand, lo, hi, order)
            fine = _batch_integrals(self._integrand, lo, hi, 2 * order)
            err = np.abs(fine - coarse)
            tiny = (hi - lo) <= 1e-13 * np.maximum(1.0, np.abs(hi))
            # Content-relative slack: huge panels (geometric spacing at
            # large x) bottom out at roundoff proportional to their size.
            ok = err <= np.maximum(tol, self._cfg.rel_tol * np.abs(fine))
            if np.any(tiny & ~ok):
                raise QuadratureError("antiderivative panel refinement stalled")
            acc_lo.append(lo[ok])
            acc_hi.append(hi[ok])
            acc_int.append(fine[ok])
            lo, hi, tol = lo[~ok], hi[~ok], tol[~ok]
            if lo.size:
                self._splits += lo.size
                if self._splits > self._cfg.max_subdivisions:
                    raise QuadratureError(
                        "antiderivative refinement exceeded max_subdivisions")
                mid = 0.5 * (lo + hi)
                lo = np.concatenate((lo, mid))
                hi = np.concatenate((mid, hi))
                tol = np.concatenate((0.5 * tol, 0.5 * tol))
        los = np.concatenate(acc_lo)
        his = np.concatenate(acc_hi)
        ints = np.concatenate(acc_int)
        order_idx = np.argsort(los, kind="stable")
        return his[order_idx], ints[order_idx]

    def ensure(self, x_max: float) -> None:
        """Extend the table so that queries up to ``x_max`` are covered.

        Extension proceeds in absolute fixed-size blocks, so both the
        panel edges and the float summation grouping are identical no
        matter in what increments the table grew.
        """
        with self._lock:
            while float(self._knots[-1]) < x_max:
                lo = self._block_boundary(self._blocks)
                hi = self._block_boundary(self._blocks + 1)
                self._extend_block(lo, hi)
                self._blocks += 1

    def _extend_block(self, lo: float, hi: float) -> None:
        base = self._base_edges(lo, hi)
        breaks = None
        if self._breakpoints is not None:
            breaks = self._breakpoints(lo, hi)
        edges = _merge_edges(lo, hi, base, breaks)
        if self._pc:
            full = np.concatenate(([lo], edges))
            mids = 0.5 * (full[:-1] + full[1:])
            vals = np.asarray(self._f(mids), dtype=float)
            ints = self._exact_piece(full[:-1], full[1:], vals)
            self._knots = np.concatenate((self._knots, edges))
            self._cum = np.concatenate(
                (self._cum, self._cum[-1] + np.cumsum(ints)))
            self._values = np.concatenate((self._values, vals))
        else:
            full = np.concatenate(([lo], edges))
            new_hi, new_int = self._refined_panels(full[:-1], full[1:])
            self._knots = np.concatenate((self._knots, new_hi))
            self._cum = np.concatenate(
                (self._cum, self._cum[-1] + np.cumsum(new_int)))

    def __call__(self, x):
        """Cumulative integral from the origin, vectorized over ``x``."""
        arr = np.asarray(x, dtype=float)
        scalar = arr.ndim == 0
        xv = np.atleast_1d(arr).ravel()
        if xv.size == 0:
            return arr.copy()
        if np.any(xv < self._origin - 1e-12):
            raise ValueError("antiderivative queried below its origin")
        xv = np.maximum(xv, self._origin)
        self.ensure(float(xv.max()))
        idx = np.searchsorted(self._knots, xv, side="right") - 1
        idx = np.clip(idx, 0, len(self._knots) - 2)
        lo = self._knots[idx]
        out = self._cum[idx] + self._partial(lo, xv, idx)
        return float(out[0]) if scalar else out.reshape(arr.shape)

    def _partial(self, lo, x, idx):
        if self._pc:
            return self._exact_piece(lo, np.maximum(x, lo), self._values[idx])
        order = self._cfg.order
        nodes, weights = gauss_legendre(order)
        half = 0.5 * (x - lo)
        pts = lo[:, None] + half[:, None] * (nodes[None, :] + 1.0)
        vals = self._integrand(pts.ravel()).reshape(pts.shape)
        return half * (vals @ weights)


def _bary_weights(nodes: np.ndarray) -> np.ndarray:
    diffs = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diffs, 1.0)
    return 1.0 / np.prod(diffs, axis=1)


class PanelTable:
    """Gauss-Legendre nodal tabulation of a function, panel by panel.

    Stores per-panel nodal values and the running integral at panel edges.
    Evaluation uses barycentric interpolation inside the owning panel;
    partial integrals integrate the interpolating polynomial exactly with
    the same rule.  Smoothness is only assumed within panels, so callers
    must put every jump or kink of the tabulated function on a panel edge.
    """

    NODES = 8

    def __init__(self, builder, origin: float, spacing: tuple[str, float],
                 breakpoints=None):
        self._builder = builder
        self._origin = float(origin)
        kind, step = spacing
        self._kind = kind
        self._step = float(step)
        self._breakpoints = breakpoints
        self._lock = threading.RLock()
        self._knots = np.array([self._origin])
        self._nodes = np.empty((0, self.NODES))
        self._vals = np.empty((0, self.NODES))
        self._cum = np.array([0.0])
        self._blocks = 0
        self._block_n = 256
        ref, w = gauss_legendre(self.NODES)
        self._ref = ref
        self._w = w
        self._bary = _bary_weights(ref)

    def _base_edges(self, lo: float, hi: float) -> np.ndarray:
        return _anchored_grid(self._origin, lo, hi, self._kind, self._step)

    def _block_boundary(self, b: int) -> float:
        if self._kind == "uniform":
            return self._origin + self._step * float(self._block_n * b)
        return self._origin * self._step ** float(self._block_n * b)

    def ensure(self, x_max: float) -> None:
        with self._lock:
            while float(self._knots[-1]) < x_max:
                lo = self._block_boundary(self._blocks)
                hi = self._block_boundary(self._blocks + 1)
                self._extend_block(lo, hi)
                self._blocks += 1

    def _extend_block(self, lo: float, hi: float) -> None:
        breaks = None
        if self._breakpoints is not None:
            breaks = self._breakpoints(lo, hi)
        edges = _merge_edges(lo, hi, self._base_edges(lo, hi), breaks)
        full = np.concatenate(([lo], edges))
        a = full[:-1][:, None]
        b = full[1:][:, None]
        nodes = 0.5 * (a + b) + 0.5 * (b - a) * self._ref[None, :]
        vals = np.asarray(self._builder(nodes.ravel()),
                          dtype=float).reshape(nodes.shape)
        ints = 0.5 * (b - a)[:, 0] * (vals @ self._w)
        self._knots = np.concatenate((self._knots, edges))
        self._nodes = np.vstack((self._nodes, nodes))
        self._vals = np.vstack((self._vals, vals))
        self._cum = np.concatenate(
            (self._cum, self._cum[-1] + np.cumsum(ints)))

    def _locate(self, xv: np.ndarray) -> np.ndarray:
        self.ensure(float(xv.max()))
        idx = np.searchsorted(self._knots, xv, side="right") - 1
        return np.clip(idx, 0, len(self._knots) - 2)

    def _interp(self, idx: np.ndarray, x: np.ndarray) -> np.ndarray:
        nodes = self._nodes[idx]
        vals = self._vals[idx]
        d = x[..., None] - nodes
        hit = np.abs(d) < 1e-14 * np.maximum(1.0, np.abs(x))[..., None]
        d = np.where(hit, 1.0, d)
        terms = self._bary / d
        out = (terms * vals).sum(axis=-1) / terms.sum(axis=-1)
        any_hit = hit.any(axis=-1)
        if np.any(any_hit):
            exact = (np.where(hit, vals, 0.0)).sum(axis=-1)
            out = np.where(any_hit, exact, out)
        return out

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        scalar = arr.ndim == 0
        xv = np.atleast_1d(arr).ravel()
        if xv.size == 0:
            return arr.copy()
        xv = np.clip(xv, self._origin, None)
        idx = self._locate(xv)
        out = self._interp(idx, xv)
        return float(out[0]) if scalar else out.reshape(arr.shape)

    def integral_to(self, x):
        """Integral of the tabulated function from the origin to ``x``."""
        arr = np.asarray(x, dtype=float)
        scalar = arr.ndim == 0
        xv = np.atleast_1d(arr).ravel()
        if xv.size == 0:
            return arr.copy()
        xv = np.clip(xv, self._origin, None)
        idx = self._locate(xv)
        lo = self._knots[idx]
        half = 0.5 * (xv - lo)
        pts = lo[:, None] + half[:, None] * (self._ref[None, :] + 1.0)
        vals = self._interp(np.repeat(idx, self.NODES),
                            pts.ravel()).reshape(pts.shape)
        out = self._cum[idx] + half * (vals @ self._w)
        return float(out[0]) if scalar else out.reshape(arr.shape)

    @property
    def knots(self) -> np.ndarray:
        return self._knots
