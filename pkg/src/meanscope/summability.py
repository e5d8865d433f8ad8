"""Summability verdicts and consistency-chain reports over the method lattice.

The lattice on the multiplicative side runs from the plain running mean
through its iterates to their common limit, which coincides with the
log-density mean; the additive side mirrors it with exponential averages
and the uniform window mean.  A method applied to a function yields a
verdict: Converges (value), Diverges (gap interval), or Inconclusive.

Verdicts band the upper/lower estimates with the configured tolerance:
converging within ``2 tol``, diverging beyond ``4 tol`` (and only with
stabilized estimates), and a deliberate dead band in between mapping to
Inconclusive so the engine never overclaims.  The banded trichotomy is a
numerical surrogate: the underlying definitions are exact limits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .asymptotics import (ThetaSchedule, TowerResult, WindowSchedule,
                          lower_dual, upper_L1, upper_M1, upper_single,
                          upper_tower_limit)
from .funcspace import BoundedFunction, DomainMismatchError, DomainTag
from .quadrature import QuadratureConfig

__all__ = [
    "MethodId",
    "MeanVerdict",
    "CheckResult",
    "ChainReport",
    "classify",
    "verdict",
    "chain_report",
    "MONOTONE_SLACK",
]

MONOTONE_SLACK = 0.01   # allowed estimation noise in the decreasing tower
_LIMIT_TOL_FACTOR = 1.5  # combined tolerance for the tower-vs-mean check

_ADDITIVE_CODES = {"exp", "exp-iter", "exp-limit", "almost-conv"}
_MULTIPLICATIVE_CODES = {"cesaro", "holder", "holder-limit", "log-cesaro"}
_ORDERED_CODES = {"holder", "exp-iter"}


@dataclass(frozen=True)
class MethodId:
    """A summability method: lattice code plus iterate order where needed.

    Codes: ``cesaro`` (running mean), ``holder:k`` (k-fold running mean),
    ``holder-limit``, ``log-cesaro`` on the multiplicative side;
    ``exp``, ``exp-iter:n``, ``exp-limit``, ``almost-conv`` on the
    additive side.
    """

    code: str
    order: int = 1

    def __post_init__(self) -> None:
        if self.code not in _ADDITIVE_CODES | _MULTIPLICATIVE_CODES:
            raise ValueError(
                f"unknown method {self.code!r}; valid: "
                + ", ".join(sorted(_ADDITIVE_CODES | _MULTIPLICATIVE_CODES)))
        if self.order < 1:
            raise ValueError("method order must be at least 1")
        if self.order != 1 and self.code not in _ORDERED_CODES:
            raise ValueError(f"method {self.code!r} takes no order")

    @classmethod
    def parse(cls, text: str) -> "MethodId":
        """Parse ``"holder:3"``-style method names."""
        code, _, tail = text.partition(":")
        if not tail:
            return cls(code)
        try:
            order = int(tail)
        except ValueError:
            raise ValueError(f"bad method order in {text!r}") from None
        return cls(code, order)

    @property
    def domain(self) -> DomainTag:
        return (DomainTag.ADDITIVE if self.code in _ADDITIVE_CODES
                else DomainTag.MULTIPLICATIVE)

    def __str__(self) -> str:
        if self.code in _ORDERED_CODES:
            return f"{self.code}:{self.order}"
        return self.code


@dataclass
class MeanVerdict:
    """Outcome of applying a summability method to a function."""

    method: MethodId
    status: str                      # "converges" | "diverges" | "inconclusive"
    value: Optional[float]
    gap: Optional[tuple]
    upper: float
    lower: float
    tol: float
    diagnostics: str = ""


@dataclass
class CheckResult:
    """One consistency check with its numeric slack (pass = slack >= 0)."""

    name: str
    lhs: float
    rhs: float
    slack: float
    passed: bool


@dataclass
class ChainReport:
    """All verdicts up the tower plus the chain consistency checks."""

    function: str
    tol: float
    verdicts: list
    checks: list
    tower_k: list = field(default_factory=list)
    tower_upper: list = field(default_factory=list)
    tower_lower: list = field(default_factory=list)


def classify(upper: float, lower: float, tol: float,
             stabilized: bool) -> tuple:
    """Pure verdict classification from the estimate pair.

    Returns ``(status, value, gap)``; same inputs always give the same
    verdict.
    """
    gap = upper - lower
    if gap <= 2.0 * tol:
        return "converges", 0.5 * (upper + lower), None
    if gap > 4.0 * tol and stabilized:
        return "diverges", None, (lower, upper)
    return "inconclusive", None, None


def _estimate_pair(f: BoundedFunction, method: MethodId, tol: float,
                   windows, thetas, quad, l1_mode: str, tower_k_max: int):
    code = method.code
    if code in ("cesaro", "holder"):
        order = method.order if code == "holder" else 1
        up = upper_single(f, "cesaro", order, windows, quad)
        lo = lower_dual(upper_single, f, "cesaro", order, windows, quad)
    elif code in ("exp", "exp-iter"):
        order = method.order if code == "exp-iter" else 1
        up = upper_single(f, "exp", order, windows, quad)
        lo = lower_dual(upper_single, f, "exp", order, windows, quad)
    elif code == "holder-limit":
        up = upper_tower_limit(f, "cesaro", tol, tower_k_max, windows, quad)
        lo = lower_dual(upper_tower_limit, f, "cesaro", tol, tower_k_max,
                        windows, quad)
    elif code == "exp-limit":
        up = upper_tower_limit(f, "exp", tol, tower_k_max, windows, quad)
        lo = lower_dual(upper_tower_limit, f, "exp", tol, tower_k_max,
                        windows, quad)
    elif code == "log-cesaro":
        up = upper_L1(f, thetas, windows, quad, mode=l1_mode)
        lo = lower_dual(upper_L1, f, thetas, windows, quad, mode=l1_mode)
    elif code == "almost-conv":
        up = upper_M1(f, thetas, windows, quad)
        lo = lower_dual(upper_M1, f, thetas, windows, quad)
    else:  # pragma: no cover - guarded by MethodId validation
        raise ValueError(f"unhandled method {code!r}")
    return up, lo


def verdict(f: BoundedFunction, method: MethodId, tol: float = 0.02, *,
            windows: WindowSchedule | None = None,
            thetas: ThetaSchedule | None = None,
            quad: QuadratureConfig | None = None,
            l1_mode: str = "direct",
            tower_k_max: int = 24) -> MeanVerdict:
    """Apply one summability method and classify the outcome."""
    if tol <= 0:
        raise ValueError("verdict tolerance must be positive")
    if f.domain is not method.domain:
        raise DomainMismatchError(
            f"method {method} needs a {method.domain.value}-domain function, "
            f"got {f.domain.value}")
    up, lo = _estimate_pair(f, method, tol, windows, thetas, quad,
                            l1_mode, tower_k_max)
    stabilized = bool(up.stabilized and lo.stabilized)
    status, value, gap = classify(up.value, lo.value, tol, stabilized)
    diag = (f"upper={up.value:.6g} lower={lo.value:.6g} "
            f"stabilized={'both' if stabilized else 'no'}")
    if isinstance(up, TowerResult):
        diag += f" tower_k={up.k_used}"
    return MeanVerdict(method=method, status=status, value=value, gap=gap,
                       upper=up.value, lower=lo.value, tol=tol,
                       diagnostics=diag)


def chain_report(f: BoundedFunction, k_max: int = 6, tol: float = 0.02, *,
                 windows: WindowSchedule | None = None,
                 thetas: ThetaSchedule | None = None,
                 quad: QuadratureConfig | None = None,
                 l1_mode: str = "direct",
                 tower_k_max: int = 24) -> ChainReport:
    """Verdicts up the whole tower plus chain consistency checks.

    Failed checks are recorded with their slack, never raised: the report
    is the diagnostic artifact.
    """
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    kw = dict(windows=windows, thetas=thetas, quad=quad, l1_mode=l1_mode,
              tower_k_max=tower_k_max)
    if f.domain is DomainTag.MULTIPLICATIVE:
        tower_code, limit_code, mean_code = "holder", "holder-limit", "log-cesaro"
        limit_check = "limit_matches_log_cesaro"
        ineq_check = "log_cesaro_le_cesaro"
    else:
        tower_code, limit_code, mean_code = "exp-iter", "exp-limit", "almost-conv"
        limit_check = "limit_matches_almost_conv"
        ineq_check = "almost_conv_le_exp"
    rows: list[MeanVerdict] = []
    for k in range(1, k_max + 1):
        rows.append(verdict(f, MethodId(tower_code, k), tol, **kw))
    limit_row = verdict(f, MethodId(limit_code), tol, **kw)
    mean_row = verdict(f, MethodId(mean_code), tol, **kw)
    rows.extend([limit_row, mean_row])

    checks: list[CheckResult] = []
    for k in range(k_max - 1):
        lhs, rhs = rows[k].upper, rows[k + 1].upper
        slack = lhs - rhs
        checks.append(CheckResult(f"tower_upper_monotone_k{k + 1}", lhs, rhs,
                                  slack, slack >= -MONOTONE_SLACK))
    for k in range(k_max - 1):
        a, b = rows[k], rows[k + 1]
        if a.status == "converges" and b.status == "converges":
            slack = 2.0 * tol - abs(a.value - b.value)
            checks.append(CheckResult(f"tower_consistency_k{k + 1}",
                                      a.value, b.value, slack, slack >= 0.0))
    slack = _LIMIT_TOL_FACTOR * tol - abs(limit_row.upper - mean_row.upper)
    checks.append(CheckResult(limit_check, limit_row.upper, mean_row.upper,
                              slack, slack >= 0.0))
    slack = rows[0].upper - mean_row.upper
    checks.append(CheckResult(ineq_check, mean_row.upper, rows[0].upper,
                              slack, slack >= -MONOTONE_SLACK))

    return ChainReport(
        function=f.label, tol=tol, verdicts=rows, checks=checks,
        tower_k=list(range(1, k_max + 1)),
        tower_upper=[rows[k].upper for k in range(k_max)],
        tower_lower=[rows[k].lower for k in range(k_max)])


# ---------------------------------------------------------------------------
# Serialization (stable field names; floats at 12 significant digits)
# ---------------------------------------------------------------------------

def round12(x):
    """12-significant-digit float rounding for byte-stable reports."""
    if x is None:
        return None
    return float(f"{float(x):.12g}")


def fmt12(x) -> str:
    return "" if x is None else f"{float(x):.12g}"


def verdict_record(v: MeanVerdict, function: str) -> dict:
    return {
        "function": function,
        "method": str(v.method),
        "status": v.status,
        "value": round12(v.value),
        "gap_lo": round12(v.gap[0]) if v.gap else None,
        "gap_hi": round12(v.gap[1]) if v.gap else None,
        "upper": round12(v.upper),
        "lower": round12(v.lower),
        "tol": round12(v.tol),
        "diagnostics": v.diagnostics,
    }

VERDICT_CSV_COLUMNS = ["function", "method", "status", "value", "gap_lo",
                       "gap_hi", "upper", "lower", "tol"]


def verdict_csv_row(v: MeanVerdict, function: str) -> list:
    rec = verdict_record(v, function)
    return [rec["function"], rec["method"], rec["status"], fmt12(v.value),
            fmt12(v.gap[0]) if v.gap else "",
            fmt12(v.gap[1]) if v.gap else "",
            fmt12(v.upper), fmt12(v.lower), fmt12(v.tol)]


def report_to_dict(report: ChainReport) -> dict:
    return {
        "function": report.function,
        "tol": round12(report.tol),
        "methods": [verdict_record(v, report.function)
                    for v in report.verdicts],
        "checks": [{
            "name": c.name,
            "lhs": round12(c.lhs),
            "rhs": round12(c.rhs),
            "slack": round12(c.slack),
            "pass": bool(c.passed),
        } for c in report.checks],
        "tower": {
            "k": list(report.tower_k),
            "upper": [round12(u) for u in report.tower_upper],
            "lower": [round12(v) for v in report.tower_lower],
        },
    }


def report_csv_rows(report: ChainReport) -> list:
    return [verdict_csv_row(v, report.function) for v in report.verdicts]
