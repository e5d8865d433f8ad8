"""Bounded functions on a half-line and their elementary group actions.

The additive domain is ``[0, oo)`` with the translation action
``f(x) -> f(x + s)``; the multiplicative domain is ``[1, oo)`` with the
dilation action ``f(x) -> f(rx)``.  The change of variables
``x -> exp(x)`` swaps the two pictures.

Functions are pure evaluators plus metadata, not sampled arrays: every
downstream operator evaluates at its own quadrature nodes, and closed-form
evaluators avoid interpolation error.  Evaluators accept floats or numpy
arrays and must be deterministic.
"""

from __future__ import annotations

import enum
import math
import numbers
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "DomainTag",
    "SmoothnessHint",
    "ConjugationDirection",
    "BoundedFunction",
    "CorpusEntry",
    "DomainMismatchError",
    "UnknownLabelError",
    "make_function",
    "shift",
    "dilate",
    "conjugate_W",
    "corpus",
    "corpus_lookup",
    "sup_norm_estimate",
]

_LOG2 = math.log(2.0)
_LOG4 = math.log(4.0)
_EXP_SAFE_MAX = 700.0  # exp() overflows just above this


class DomainTag(enum.Enum):
    """Which half-line the coordinate ranges over."""

    ADDITIVE = "additive"          # [0, oo), translation action
    MULTIPLICATIVE = "multiplicative"  # [1, oo), dilation action

    @property
    def start(self) -> float:
        return 0.0 if self is DomainTag.ADDITIVE else 1.0


class SmoothnessHint(enum.Enum):
    SMOOTH = "smooth"
    PIECEWISE_CONSTANT = "piecewise_constant"
    UNKNOWN = "unknown"


class ConjugationDirection(enum.Enum):
    TO_ADDITIVE = "to_additive"
    TO_MULTIPLICATIVE = "to_multiplicative"


class DomainMismatchError(ValueError):
    """An operation received a function on the wrong half-line."""


class UnknownLabelError(KeyError):
    """No corpus entry with the requested label."""


@dataclass(eq=False)
class BoundedFunction:
    """An evaluable bounded real function on a half-line.

    ``evaluate`` is a pure map accepting floats or numpy arrays;
    ``bound`` is a declared constant with ``sup |f| <= bound`` (declared,
    not computed -- see :func:`sup_norm_estimate` for the check).
    ``breakpoints(lo, hi)`` lists the jump/kink locations inside
    ``[lo, hi]`` for piecewise functions; quadrature panels split there.
    ``hints`` carries optional structural accelerations attached by the
    operator layer (exact antiderivatives, linear-combination parts,
    conjugation siblings); they never change values, only cost.
    """

    label: str
    domain: DomainTag
    evaluate: Callable
    bound: float
    smoothness_hint: SmoothnessHint = SmoothnessHint.UNKNOWN
    derivative: Optional[Callable] = None
    breakpoints: Optional[Callable] = None
    piecewise_constant: bool = False
    hints: dict = field(default_factory=dict, repr=False)

    def __call__(self, x):
        return self.evaluate(x)

    # -- linear-combination algebra --------------------------------------

    def __add__(self, other):
        if not isinstance(other, BoundedFunction):
            return NotImplemented
        return _combine(f"({self.label} + {other.label})",
                        _parts(self) + _parts(other))

    def __sub__(self, other):
        if not isinstance(other, BoundedFunction):
            return NotImplemented
        return _combine(f"({self.label} - {other.label})",
                        _parts(self) + _scale_parts(-1.0, _parts(other)))

    def __neg__(self):
        return _combine(f"-({self.label})", _scale_parts(-1.0, _parts(self)))

    def __mul__(self, c):
        if not isinstance(c, numbers.Real):
            return NotImplemented
        return _combine(f"{float(c):g}*({self.label})",
                        _scale_parts(float(c), _parts(self)))

    __rmul__ = __mul__


def _parts(f: BoundedFunction):
    return f.hints.get("parts", ((1.0, f),))


def _scale_parts(c: float, parts):
    return tuple((c * ci, atom) for ci, atom in parts)


def _combine(label: str, parts) -> BoundedFunction:
    atoms = [atom for _, atom in parts]
    domain = atoms[0].domain
    for atom in atoms[1:]:
        if atom.domain is not domain:
            raise DomainMismatchError(
                "cannot combine functions on different half-lines")
    coeffs = np.array([c for c, _ in parts])

    def ev(x, _parts=parts):
        acc = None
        for c, atom in _parts:
            v = c * np.asarray(atom.evaluate(x), dtype=float)
            acc = v if acc is None else acc + v
        return acc

    deriv = None
    if all(atom.derivative is not None for atom in atoms):
        def deriv(x, _parts=parts):
            acc = None
            for c, atom in _parts:
                v = c * np.asarray(atom.derivative(x), dtype=float)
                acc = v if acc is None else acc + v
            return acc

    bp_owners = [a for a in atoms if a.breakpoints is not None]
    bps = None
    if bp_owners:
        def bps(lo, hi, _owners=tuple(bp_owners)):
            pooled = [np.asarray(o.breakpoints(lo, hi), dtype=float)
                      for o in _owners]
            return np.unique(np.concatenate(pooled)) if pooled else np.array([])

    pc = all(atom.piecewise_constant for atom in atoms)
    if all(a.smoothness_hint is SmoothnessHint.SMOOTH for a in atoms):
        hint = SmoothnessHint.SMOOTH
    elif pc:
        hint = SmoothnessHint.PIECEWISE_CONSTANT
    else:
        hint = SmoothnessHint.UNKNOWN
    return BoundedFunction(
        label=label, domain=domain, evaluate=ev,
        bound=float(np.abs(coeffs) @ np.array([a.bound for a in atoms])),
        smoothness_hint=hint, derivative=deriv, breakpoints=bps,
        piecewise_constant=pc, hints={"parts": tuple(parts)})


def _as_vectorized(fn, probe_x):
    """Return fn if it handles arrays elementwise, else a vectorized wrap."""
    try:
        out = np.asarray(fn(probe_x), dtype=float)
        if out.shape == probe_x.shape:
            return fn
    except Exception:
        pass
    vec = np.vectorize(fn, otypes=[float])

    def wrapped(x, _vec=vec, _fn=fn):
        arr = np.asarray(x, dtype=float)
        return _vec(arr) if arr.ndim else float(_fn(float(arr)))

    return wrapped


def make_function(label: str, domain: DomainTag, evaluator, bound: float,
                  hint: SmoothnessHint = SmoothnessHint.UNKNOWN,
                  derivative=None, breakpoints=None) -> BoundedFunction:
    """Wrap a pure evaluator and its metadata into a BoundedFunction.

    Rejects a negative bound and spot-checks ``|f| <= bound`` on a short
    probe grid near the domain start.
    """
    bound = float(bound)
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    start = domain.start
    probe = start + np.linspace(0.0, 32.0, 65)
    evaluator = _as_vectorized(evaluator, probe)
    vals = np.asarray(evaluator(probe), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError(f"evaluator for {label!r} returned non-finite values")
    if np.max(np.abs(vals)) > bound + 1e-12 * (1.0 + bound):
        raise ValueError(
            f"evaluator for {label!r} exceeds its declared bound {bound:g}")
    if derivative is not None:
        derivative = _as_vectorized(derivative, probe)
    return BoundedFunction(
        label=label, domain=domain, evaluate=evaluator, bound=bound,
        smoothness_hint=hint, derivative=derivative, breakpoints=breakpoints,
        piecewise_constant=(hint is SmoothnessHint.PIECEWISE_CONSTANT
                            and breakpoints is not None))


# ---------------------------------------------------------------------------
# Group actions
# ---------------------------------------------------------------------------

def shift(f: BoundedFunction, s: float) -> BoundedFunction:
    """Translate: the result evaluates to ``f(x + s)``."""
    if f.domain is not DomainTag.ADDITIVE:
        raise DomainMismatchError("shift acts on the additive half-line")
    s = float(s)
    if s < 0:
        raise ValueError("shift distance must be nonnegative")

    def ev(x, _f=f.evaluate, _s=s):
        return _f(np.asarray(x, dtype=float) + _s)

    deriv = None
    if f.derivative is not None:
        def deriv(x, _d=f.derivative, _s=s):
            return _d(np.asarray(x, dtype=float) + _s)

    bps = None
    if f.breakpoints is not None:
        def bps(lo, hi, _b=f.breakpoints, _s=s):
            return np.asarray(_b(lo + _s, hi + _s), dtype=float) - _s

    def anti_plain(cfg, resolve, _f=f, _s=s):
        F = resolve(_f, cfg, "plain")
        base = F(_s)
        return lambda x: F(np.asarray(x, dtype=float) + _s) - base

    return BoundedFunction(
        label=f"shift[{s:g}]({f.label})", domain=f.domain, evaluate=ev,
        bound=f.bound, smoothness_hint=f.smoothness_hint, derivative=deriv,
        breakpoints=bps, piecewise_constant=f.piecewise_constant,
        hints={"anti_plain": anti_plain})


def dilate(f: BoundedFunction, r: float) -> BoundedFunction:
    """Dilate: the result evaluates to ``f(r x)``."""
    if f.domain is not DomainTag.MULTIPLICATIVE:
        raise DomainMismatchError("dilate acts on the multiplicative half-line")
    r = float(r)
    if r < 1:
        raise ValueError("dilation factor must be at least 1")

    def ev(x, _f=f.evaluate, _r=r):
        return _f(np.asarray(x, dtype=float) * _r)

    deriv = None
    if f.derivative is not None:
        def deriv(x, _d=f.derivative, _r=r):
            return _r * np.asarray(_d(np.asarray(x, dtype=float) * _r), dtype=float)

    bps = None
    if f.breakpoints is not None:
        def bps(lo, hi, _b=f.breakpoints, _r=r):
            return np.asarray(_b(lo * _r, hi * _r), dtype=float) / _r

    def anti_plain(cfg, resolve, _f=f, _r=r):
        F = resolve(_f, cfg, "plain")
        base = F(_r)
        return lambda x: (F(np.asarray(x, dtype=float) * _r) - base) / _r

    def anti_log(cfg, resolve, _f=f, _r=r):
        G = resolve(_f, cfg, "log")
        base = G(_r)
        return lambda x: G(np.asarray(x, dtype=float) * _r) - base

    return BoundedFunction(
        label=f"dilate[{r:g}]({f.label})", domain=f.domain, evaluate=ev,
        bound=f.bound, smoothness_hint=f.smoothness_hint, derivative=deriv,
        breakpoints=bps, piecewise_constant=f.piecewise_constant,
        hints={"anti_plain": anti_plain, "anti_log": anti_log})


def _checked_exp(x):
    xv = np.asarray(x, dtype=float)
    if np.any(xv > _EXP_SAFE_MAX):
        raise OverflowError(
            "composed conjugation evaluated past exp overflow; "
            "attach a log-coordinate sibling to the source function")
    return np.exp(xv)


def conjugate_W(f: BoundedFunction,
                direction: ConjugationDirection) -> BoundedFunction:
    """Exponential change of variables between the two half-lines.

    ``TO_ADDITIVE`` sends a multiplicative-domain ``f`` to ``x -> f(e^x)``;
    ``TO_MULTIPLICATIVE`` sends an additive-domain ``g`` to
    ``x -> g(log x)``.  The two maps invert each other pointwise and
    preserve the declared bound.  If the source carries a precomputed
    sibling (corpus functions do), that sibling is returned so huge
    coordinates never pass through ``exp``.
    """
    if direction is ConjugationDirection.TO_ADDITIVE:
        if f.domain is not DomainTag.MULTIPLICATIVE:
            raise DomainMismatchError(
                "conjugation to the additive side needs multiplicative input")
        sibling = f.hints.get("w_image")
        if sibling is not None:
            return sibling
        if "parts" in f.hints:
            return _combine(f"W({f.label})",
                            tuple((c, conjugate_W(a, direction))
                                  for c, a in f.hints["parts"]))

        def ev(x, _f=f.evaluate):
            return _f(_checked_exp(x))

        deriv = None
        if f.derivative is not None:
            def deriv(x, _d=f.derivative):
                t = _checked_exp(x)
                return np.asarray(_d(t), dtype=float) * t

        bps = None
        if f.breakpoints is not None:
            def bps(lo, hi, _b=f.breakpoints):
                pts = np.asarray(_b(float(np.exp(lo)), float(np.exp(hi))),
                                 dtype=float)
                return np.log(pts) if pts.size else pts

        def anti_plain(cfg, resolve, _f=f):
            G = resolve(_f, cfg, "log")
            return lambda x: G(_checked_exp(x))

        return BoundedFunction(
            label=f"W({f.label})", domain=DomainTag.ADDITIVE, evaluate=ev,
            bound=f.bound, smoothness_hint=f.smoothness_hint, derivative=deriv,
            breakpoints=bps, piecewise_constant=f.piecewise_constant,
            hints={"anti_plain": anti_plain})

    if direction is ConjugationDirection.TO_MULTIPLICATIVE:
        if f.domain is not DomainTag.ADDITIVE:
            raise DomainMismatchError(
                "conjugation to the multiplicative side needs additive input")
        sibling = f.hints.get("w_preimage")
        if sibling is not None:
            return sibling
        if "parts" in f.hints:
            return _combine(f"Winv({f.label})",
                            tuple((c, conjugate_W(a, direction))
                                  for c, a in f.hints["parts"]))

        def ev(x, _f=f.evaluate):
            return _f(np.log(np.asarray(x, dtype=float)))

        deriv = None
        if f.derivative is not None:
            def deriv(x, _d=f.derivative):
                xv = np.asarray(x, dtype=float)
                return np.asarray(_d(np.log(xv)), dtype=float) / xv

        bps = None
        if f.breakpoints is not None:
            def bps(lo, hi, _b=f.breakpoints):
                pts = np.asarray(_b(float(np.log(lo)), float(np.log(hi))),
                                 dtype=float)
                return np.exp(pts) if pts.size else pts

        def anti_log(cfg, resolve, _f=f):
            F = resolve(_f, cfg, "plain")
            return lambda x: F(np.log(np.asarray(x, dtype=float)))

        return BoundedFunction(
            label=f"Winv({f.label})", domain=DomainTag.MULTIPLICATIVE,
            evaluate=ev, bound=f.bound, smoothness_hint=f.smoothness_hint,
            derivative=deriv, breakpoints=bps,
            piecewise_constant=f.piecewise_constant,
            hints={"anti_log": anti_log})

    raise ValueError(f"unknown conjugation direction {direction!r}")


# ---------------------------------------------------------------------------
# Corpus
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorpusEntry:
    """A test function together with its closed-form oracle values.

    ``known_values`` keys use the method-lattice shorthand
    ``upper_M/lower_M`` (Cesaro limsup/liminf), ``upper_Hk`` (k-fold
    Cesaro), ``upper_L1/lower_L1`` (log-density mean), ``upper_R`` and
    ``upper_En`` (exponential averages), ``upper_M1/lower_M1`` (uniform
    window mean).
    """

    function: BoundedFunction
    known_values: dict
    oracle_note: str


def _const_eval(c):
    def ev(x, _c=float(c)):
        arr = np.asarray(x, dtype=float)
        return np.full(arr.shape, _c) if arr.ndim else _c
    return ev


def _dyadic_eval(x):
    xv = np.asarray(x, dtype=float)
    arr = np.atleast_1d(xv)
    k = np.floor(np.log(arr) / _LOG4)
    # log rounding can misplace k by one; 4**k is exact in binary floats
    k = np.where(4.0 ** (k + 1) <= arr, k + 1, k)
    k = np.where(4.0 ** k > arr, k - 1, k)
    out = np.where(arr < 2.0 * 4.0 ** k, 1.0, 0.0)
    return float(out[0]) if xv.ndim == 0 else out.reshape(xv.shape)


def _dyadic_breaks(lo, hi):
    k_lo = max(0, int(np.floor(np.log(max(lo, 1.0)) / _LOG4)) - 1)
    k_hi = int(np.ceil(np.log(max(hi, 4.0)) / _LOG4)) + 1
    ks = 4.0 ** np.arange(k_lo, k_hi + 1)
    pts = np.sort(np.concatenate((ks, 2.0 * ks)))
    return pts[(pts > lo) & (pts < hi)]


def _dyadic_log_eval(x):
    xv = np.asarray(x, dtype=float)
    arr = np.atleast_1d(xv)
    k = np.floor(arr / _LOG4)
    frac = arr - k * _LOG4
    out = np.where(frac < _LOG2, 1.0, 0.0)
    return float(out[0]) if xv.ndim == 0 else out.reshape(xv.shape)


def _dyadic_log_breaks(lo, hi):
    k_lo = max(0, int(np.floor(lo / _LOG4)) - 1)
    k_hi = int(np.ceil(hi / _LOG4)) + 1
    ks = _LOG4 * np.arange(k_lo, k_hi + 1)
    pts = np.sort(np.concatenate((ks, ks + _LOG2)))
    return pts[(pts > lo) & (pts < hi)]


_corpus_lock = threading.RLock()
_corpus_cache: list[CorpusEntry] | None = None
_HALF_POWERS = {f"upper_H{k}": 2.0 ** (-k / 2.0) for k in range(1, 7)}
_HALF_POWERS_E = {f"upper_E{k}": 2.0 ** (-k / 2.0) for k in range(1, 7)}


def _const_entry(c: float, domain: DomainTag) -> CorpusEntry:
    fn = make_function(f"const:{c:g}", domain, _const_eval(c), abs(float(c)),
                       SmoothnessHint.SMOOTH,
                       derivative=_const_eval(0.0))
    if domain is DomainTag.ADDITIVE:
        known = {"upper_M1": c, "lower_M1": c, "upper_R": c}
    else:
        known = {"upper_M": c, "lower_M": c, "upper_L1": c, "lower_L1": c}
    return CorpusEntry(fn, known,
                       "constants are fixed by every averaging operator, so "
                       "all upper/lower means equal the constant")


def _build_corpus() -> list[CorpusEntry]:
    sin_fn = make_function("sin", DomainTag.ADDITIVE, np.sin, 1.0,
                           SmoothnessHint.SMOOTH, derivative=np.cos)
    decay_fn = make_function(
        "decay", DomainTag.ADDITIVE,
        lambda x: 1.0 / (1.0 + np.asarray(x, dtype=float)), 1.0,
        SmoothnessHint.SMOOTH,
        derivative=lambda x: -1.0 / (1.0 + np.asarray(x, dtype=float)) ** 2)
    sinlog_fn = make_function(
        "sinlog", DomainTag.MULTIPLICATIVE,
        lambda x: np.sin(np.log(np.asarray(x, dtype=float))), 1.0,
        SmoothnessHint.SMOOTH,
        derivative=lambda x: np.cos(np.log(np.asarray(x, dtype=float)))
        / np.asarray(x, dtype=float))
    dyadic_fn = make_function("dyadic-indicator", DomainTag.MULTIPLICATIVE,
                              _dyadic_eval, 1.0,
                              SmoothnessHint.PIECEWISE_CONSTANT,
                              breakpoints=_dyadic_breaks)
    dyadic_log_fn = make_function("dyadic-indicator-log", DomainTag.ADDITIVE,
                                  _dyadic_log_eval, 1.0,
                                  SmoothnessHint.PIECEWISE_CONSTANT,
                                  breakpoints=_dyadic_log_breaks)

    const_add = _const_entry(1.0, DomainTag.ADDITIVE)
    const_mult = _const_entry(1.0, DomainTag.MULTIPLICATIVE)

    # Conjugation siblings: evaluate the exp change of variables in stable
    # log coordinates instead of composing through exp().
    sinlog_fn.hints["w_image"] = sin_fn
    sin_fn.hints["w_preimage"] = sinlog_fn
    dyadic_fn.hints["w_image"] = dyadic_log_fn
    dyadic_log_fn.hints["w_preimage"] = dyadic_fn
    const_mult.function.hints["w_image"] = const_add.function
    const_add.function.hints["w_preimage"] = const_mult.function

    entries = [
        const_add,
        const_mult,
        CorpusEntry(
            sin_fn,
            {"upper_M1": 0.0, "lower_M1": 0.0,
             "upper_R": math.sqrt(2.0) / 2.0, **_HALF_POWERS_E},
            "window means die like 2/theta because the antiderivative is "
            "bounded; each exponential average scales the oscillation by "
            "|1/(1+i)| = 2**-1/2, so upper_En = 2**(-n/2) and upper_R is "
            "the n=1 amplitude sqrt(2)/2"),
        CorpusEntry(
            decay_fn,
            {"upper_M1": 0.0, "lower_M1": 0.0, "upper_R": 0.0,
             "upper_E1": 0.0},
            "the function tends to 0 at infinity, so every regular "
            "averaging method sums it to 0"),
        CorpusEntry(
            sinlog_fn,
            {"upper_L1": 0.0, "lower_L1": 0.0,
             "upper_M": math.sqrt(2.0) / 2.0, **_HALF_POWERS},
            "each running average scales the x**i component by |1/(1+i)| "
            "= 2**-1/2, so upper_Hk = 2**(-k/2); the log-density mean of "
            "a bounded sine of log x vanishes"),
        CorpusEntry(
            dyadic_fn,
            {"upper_M": 2.0 / 3.0, "lower_M": 1.0 / 3.0,
             "upper_L1": 0.5, "lower_L1": 0.5},
            "geometric-series density: the running average at x = 2*4**K "
            "tends to 2/3 and at x = 4**(K+1) to 1/3; in log coordinates "
            "the set is log4-periodic with density 1/2"),
        CorpusEntry(
            dyadic_log_fn,
            {"upper_M1": 0.5, "lower_M1": 0.5},
            "the set is log4-periodic with measure log2 per period, so "
            "window means converge to the density 1/2 uniformly"),
    ]
    return entries


def corpus() -> list[CorpusEntry]:
    """The built-in analytic test corpus (shared immutable entries)."""
    global _corpus_cache
    with _corpus_lock:
        if _corpus_cache is None:
            _corpus_cache = _build_corpus()
        return list(_corpus_cache)


def corpus_lookup(label: str,
                  domain: DomainTag | None = None) -> CorpusEntry:
    """Find a corpus entry by exact label, optionally pinned to a domain.

    Labels of the form ``const:<value>`` are synthesized on demand (both
    domains exist; pass ``domain`` to disambiguate).
    """
    matches = [e for e in corpus()
               if e.function.label == label
               and (domain is None or e.function.domain is domain)]
    if len(matches) == 1:
        return matches[0]
    if len(matches) > 1:
        raise UnknownLabelError(
            f"label {label!r} exists on both half-lines; specify the domain")
    if label.startswith("const:"):
        try:
            c = float(label.split(":", 1)[1])
        except ValueError:
            raise UnknownLabelError(f"bad constant label {label!r}") from None
        if domain is None:
            raise UnknownLabelError(
                f"label {label!r} exists on both half-lines; specify the domain")
        return _const_entry(c, domain)
    raise UnknownLabelError(f"no corpus entry labeled {label!r}")


def sup_norm_estimate(f: BoundedFunction, x_max: float, samples: int) -> float:
    """Max of ``|f|`` on a uniform grid; never exceeds the declared bound."""
    if samples < 2:
        raise ValueError("samples must be at least 2")
    x_max = float(x_max)
    if not np.isfinite(x_max) or x_max <= f.domain.start:
        raise ValueError("x_max must be finite and inside the domain")
    grid = np.linspace(f.domain.start, x_max, int(samples))
    return float(min(np.max(np.abs(np.asarray(f.evaluate(grid), dtype=float))),
                     f.bound))
