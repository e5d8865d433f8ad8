"""Command-line front end.

Subcommands::

    meanscope corpus list
    meanscope eval --fn LABEL --op {window:T|exp|cesaro|kernel:N} \
        --from X --to Y --points N
    meanscope verdict --fn LABEL --method NAME [--tol T]
    meanscope chain --fn LABEL --kmax K
    meanscope kernel --n N --from A --to B --points P

Every subcommand accepts ``--config PATH`` (plain ``key = value`` file,
unknown keys are errors), ``--format {json,csv,text}`` and ``--out PATH``.
Reports are byte-stable for identical inputs: the numerics are
deterministic and floats are rendered at 12 significant digits.  When a
report is written to a file, a matplotlib figure is rendered next to it
(same stem, ``.png``) unless ``--no-plot`` is given.  The CLI adds no
numerics of its own; everything it prints is reachable through the
library API.

Exit codes: 0 success, 2 usage error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .asymptotics import ThetaSchedule, WindowSchedule
from .funcspace import (BoundedFunction, DomainMismatchError, DomainTag,
                        UnknownLabelError, corpus, corpus_lookup)
from .operators import (exp_average, exp_average_via_kernel, cesaro_average,
                        gamma_kernel_eval, window_average)
from .quadrature import QuadratureConfig, QuadratureError
from .summability import (ChainReport, MethodId, VERDICT_CSV_COLUMNS,
                          chain_report, fmt12, report_csv_rows,
                          report_to_dict, verdict, verdict_csv_row,
                          verdict_record)

__all__ = ["CliConfig", "main", "run", "export_plot_data"]


_CONFIG_FIELDS = {
    "quad_abs_tol": float,
    "quad_rel_tol": float,
    "quad_rule": str,
    "quad_max_subdivisions": int,
    "window_x_start": float,
    "window_growth": float,
    "window_count": int,
    "window_samples": int,
    "window_stabilization_tol": float,
    "theta_start": float,
    "theta_growth": float,
    "theta_max_steps": int,
    "theta_stabilization_tol": float,
    "verdict_tol": float,
    "tower_k_max": int,
    "log_cesaro_mode": str,
    "format": str,
    "out": str,
}


@dataclass
class CliConfig:
    """Numerics and output settings, file-loadable and flag-overridable."""

    quad_abs_tol: float = 1e-10
    quad_rel_tol: float = 1e-9
    quad_rule: str = "gl16"
    quad_max_subdivisions: int = 2**15
    window_x_start: float = 10.0
    window_growth: float = 1.5
    window_count: int = 24
    window_samples: int = 512
    window_stabilization_tol: float = 1e-3
    theta_start: float = 1.0
    theta_growth: float = 2.0
    theta_max_steps: int = 16
    theta_stabilization_tol: float = 1e-3
    verdict_tol: float = 0.02
    tower_k_max: int = 24
    log_cesaro_mode: str = "direct"
    format: str = "text"
    out: str = ""

    @classmethod
    def from_file(cls, path: str) -> "CliConfig":
        cfg = cls()
        text = Path(path).read_text()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _CONFIG_FIELDS:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                setattr(cfg, key, _CONFIG_FIELDS[key](value))
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: bad value {value!r} for {key}") from None
        return cfg

    def quad(self) -> QuadratureConfig:
        return QuadratureConfig(abs_tol=self.quad_abs_tol,
                                rel_tol=self.quad_rel_tol,
                                max_subdivisions=self.quad_max_subdivisions,
                                rule=self.quad_rule)

    def windows(self) -> WindowSchedule:
        return WindowSchedule(x_start=self.window_x_start,
                              growth=self.window_growth,
                              window_count=self.window_count,
                              samples_per_window=self.window_samples,
                              stabilization_tol=self.window_stabilization_tol)

    def thetas(self) -> ThetaSchedule:
        return ThetaSchedule(theta_start=self.theta_start,
                             growth=self.theta_growth,
                             max_steps=self.theta_max_steps,
                             stabilization_tol=self.theta_stabilization_tol)


class UsageError(ValueError):
    """Bad labels, methods, ranges, or config keys (exit code 2)."""


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="plain key = value config file")
    common.add_argument("--format", choices=["json", "csv", "text"],
                        help="report format (default text)")
    common.add_argument("--out", metavar="PATH",
                        help="write the report to PATH instead of stdout")
    common.add_argument("--no-plot", action="store_true",
                        help="skip the figure next to --out")

    parser = argparse.ArgumentParser(
        prog="meanscope",
        description="Averaging operators, invariant-mean functionals and "
                    "summability verdicts on half-line functions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_corpus = sub.add_parser("corpus", help="corpus inspection",
                              parents=[common])
    corpus_sub = p_corpus.add_subparsers(dest="corpus_command", required=True)
    corpus_sub.add_parser("list", help="list corpus entries",
                          parents=[common])

    p_eval = sub.add_parser("eval", help="trace an operator image",
                            parents=[common])
    p_eval.add_argument("--fn", required=True, metavar="LABEL")
    p_eval.add_argument("--op", required=True, metavar="OP",
                        help="window:THETA | exp | cesaro | kernel:N")
    p_eval.add_argument("--from", dest="x_from", type=float, required=True)
    p_eval.add_argument("--to", dest="x_to", type=float, required=True)
    p_eval.add_argument("--points", type=int, required=True)

    p_verdict = sub.add_parser("verdict", help="summability verdict",
                               parents=[common])
    p_verdict.add_argument("--fn", required=True, metavar="LABEL")
    p_verdict.add_argument("--method", required=True, metavar="NAME",
                           help="cesaro | holder:K | holder-limit | "
                                "log-cesaro | exp | exp-iter:N | exp-limit | "
                                "almost-conv")
    p_verdict.add_argument("--tol", type=float, default=None)

    p_chain = sub.add_parser("chain", help="method-chain report",
                             parents=[common])
    p_chain.add_argument("--fn", required=True, metavar="LABEL")
    p_chain.add_argument("--kmax", type=int, default=6)
    p_chain.add_argument("--domain", choices=["additive", "multiplicative"],
                         default=None,
                         help="disambiguate labels that exist on both sides")

    p_kernel = sub.add_parser("kernel", help="gamma-kernel table",
                              parents=[common])
    p_kernel.add_argument("--n", type=int, required=True)
    p_kernel.add_argument("--from", dest="x_from", type=float, required=True)
    p_kernel.add_argument("--to", dest="x_to", type=float, required=True)
    p_kernel.add_argument("--points", type=int, required=True)
    return parser


def _load_config(args) -> CliConfig:
    cfg = CliConfig.from_file(args.config) if args.config else CliConfig()
    if getattr(args, "format", None):
        cfg.format = args.format
    if getattr(args, "out", None):
        cfg.out = args.out
    if cfg.format not in ("json", "csv", "text"):
        raise UsageError(f"unknown format {cfg.format!r}")
    return cfg


def _lookup(label: str, domain: DomainTag | None) -> BoundedFunction:
    try:
        return corpus_lookup(label, domain).function
    except UnknownLabelError as exc:
        raise UsageError(str(exc.args[0])) from None


def _parse_op(text: str):
    """Parse the eval --op grammar into (kind, parameter)."""
    name, _, tail = text.partition(":")
    if name == "window":
        try:
            theta = float(tail)
        except ValueError:
            raise UsageError(f"bad window width in {text!r}") from None
        if theta <= 0:
            raise UsageError("window width must be positive")
        return "window", theta
    if name == "kernel":
        try:
            n = int(tail)
        except ValueError:
            raise UsageError(f"bad kernel order in {text!r}") from None
        if n < 1:
            raise UsageError("kernel order must be at least 1")
        return "kernel", n
    if name in ("exp", "cesaro"):
        if tail:
            raise UsageError(f"operator {name!r} takes no parameter")
        return name, None
    raise UsageError(f"unknown operator {text!r}; "
                     "valid: window:THETA, exp, cesaro, kernel:N")


def _trace_grid(x_from: float, x_to: float, points: int,
                start: float) -> np.ndarray:
    if points < 1:
        raise UsageError("points must be at least 1")
    if x_to < x_from:
        raise UsageError("--to must not precede --from")
    if x_from < start:
        raise UsageError(f"--from must be at least the domain start {start:g}")
    return np.linspace(x_from, x_to, points)


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

def _emit(text: str, out: str) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv_text(header: list, rows: list) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(str(c) for c in row))
    return "\n".join(lines) + "\n"


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _save_figure(draw, path: Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    draw(ax)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)


def _trace_figure(xs, ys, title, path: Path) -> None:
    def draw(ax):
        ax.plot(xs, ys, lw=1.2)
        ax.set_xlabel("x")
        ax.set_ylabel("value")
        ax.set_title(title)
    _save_figure(draw, path)


def _tower_figure(report: ChainReport, path: Path) -> None:
    def draw(ax):
        ax.plot(report.tower_k, report.tower_upper, "o-", label="upper")
        ax.plot(report.tower_k, report.tower_lower, "s-", label="lower")
        mean_row = report.verdicts[-1]
        ax.axhline(mean_row.upper, color="gray", ls="--", lw=1.0,
                   label=str(mean_row.method))
        ax.set_xlabel("tower level k")
        ax.set_ylabel("limsup / liminf")
        ax.set_title(f"method tower: {report.function}")
        ax.legend()
    _save_figure(draw, path)


def export_plot_data(data, format: str, path) -> Path:
    """Write a chain report or an (x, value) trace as delimited data.

    ``data`` is either a :class:`ChainReport` (rows ``k,upper,lower``) or a
    sequence of ``(x, value)`` pairs (rows ``x,value``).  Floats are
    rendered at 12 significant digits.  A figure with the same stem and a
    ``.png`` suffix is written alongside.
    """
    if format not in ("csv", "json"):
        raise UsageError(f"unsupported plot-data format {format!r}")
    path = Path(path)
    try:
        if isinstance(data, ChainReport):
            rows = [(k, u, l) for k, u, l in
                    zip(data.tower_k, data.tower_upper, data.tower_lower)]
            if format == "csv":
                text = _csv_text(["k", "upper", "lower"],
                                 [[str(k), fmt12(u), fmt12(l)]
                                  for k, u, l in rows])
            else:
                text = _json_text([{"k": k, "upper": float(fmt12(u)),
                                    "lower": float(fmt12(l))}
                                   for k, u, l in rows])
            path.write_text(text)
            _tower_figure(data, path.with_suffix(".png"))
        else:
            rows = [(x, v) for x, v in data]
            if format == "csv":
                text = _csv_text(["x", "value"],
                                 [[fmt12(x), fmt12(v)] for x, v in rows])
            else:
                text = _json_text([{"x": float(fmt12(x)),
                                    "value": float(fmt12(v))}
                                   for x, v in rows])
            path.write_text(text)
            xs = [x for x, _ in rows]
            ys = [v for _, v in rows]
            _trace_figure(xs, ys, "trace", path.with_suffix(".png"))
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from None
    return path


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_corpus(args, cfg: CliConfig) -> int:
    entries = corpus()
    if cfg.format == "json":
        payload = [{
            "label": e.function.label,
            "domain": e.function.domain.value,
            "bound": e.function.bound,
            "smoothness": e.function.smoothness_hint.value,
            "known_values": {k: v for k, v in sorted(e.known_values.items())},
        } for e in entries]
        _emit(_json_text(payload), cfg.out)
    elif cfg.format == "csv":
        rows = [[e.function.label, e.function.domain.value,
                 fmt12(e.function.bound), e.function.smoothness_hint.value]
                for e in entries]
        _emit(_csv_text(["label", "domain", "bound", "smoothness"], rows),
              cfg.out)
    else:
        lines = [f"{'label':24} {'domain':15} {'bound':>8}  smoothness"]
        for e in entries:
            fn = e.function
            lines.append(f"{fn.label:24} {fn.domain.value:15} "
                         f"{fn.bound:8g}  {fn.smoothness_hint.value}")
        _emit("\n".join(lines) + "\n", cfg.out)
    return 0


def _trace_report(xs, ys, title, cfg: CliConfig, no_plot: bool) -> int:
    pairs = list(zip(xs.tolist(), [float(v) for v in ys]))
    if cfg.out:
        fmt = "csv" if cfg.format in ("csv", "text") else "json"
        out = Path(cfg.out)
        if no_plot:
            if fmt == "csv":
                out.write_text(_csv_text(["x", "value"],
                                         [[fmt12(x), fmt12(v)]
                                          for x, v in pairs]))
            else:
                out.write_text(_json_text([{"x": float(fmt12(x)),
                                            "value": float(fmt12(v))}
                                           for x, v in pairs]))
        else:
            export_plot_data(pairs, fmt, out)
        return 0
    if cfg.format == "json":
        _emit(_json_text([{"x": float(fmt12(x)), "value": float(fmt12(v))}
                          for x, v in pairs]), "")
    elif cfg.format == "csv":
        _emit(_csv_text(["x", "value"],
                        [[fmt12(x), fmt12(v)] for x, v in pairs]), "")
    else:
        lines = [title] + [f"  {fmt12(x):>18}  {fmt12(v):>18}"
                           for x, v in pairs]
        _emit("\n".join(lines) + "\n", "")
    return 0


def _cmd_eval(args, cfg: CliConfig) -> int:
    kind, param = _parse_op(args.op)
    domain = (DomainTag.MULTIPLICATIVE if kind == "cesaro"
              else DomainTag.ADDITIVE)
    f = _lookup(args.fn, domain)
    quad = cfg.quad()
    if kind == "window":
        g = window_average(f, param, quad)
        title = f"window[{param:g}]({f.label})"
    elif kind == "exp":
        g = exp_average(f, quad)
        title = f"exp_avg({f.label})"
    elif kind == "cesaro":
        g = cesaro_average(f, quad)
        title = f"cesaro({f.label})"
    else:
        g = exp_average_via_kernel(f, param, quad)
        title = f"exp_avg^{param}({f.label})"
    xs = _trace_grid(args.x_from, args.x_to, args.points, domain.start)
    ys = np.asarray(g.evaluate(xs), dtype=float)
    return _trace_report(xs, ys, title, cfg, args.no_plot)


def _cmd_verdict(args, cfg: CliConfig) -> int:
    try:
        method = MethodId.parse(args.method)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    f = _lookup(args.fn, method.domain)
    tol = args.tol if args.tol is not None else cfg.verdict_tol
    v = verdict(f, method, tol, windows=cfg.windows(), thetas=cfg.thetas(),
                quad=cfg.quad(), l1_mode=cfg.log_cesaro_mode,
                tower_k_max=cfg.tower_k_max)
    if cfg.format == "json":
        _emit(_json_text(verdict_record(v, f.label)), cfg.out)
    elif cfg.format == "csv":
        _emit(_csv_text(VERDICT_CSV_COLUMNS,
                        [verdict_csv_row(v, f.label)]), cfg.out)
    else:
        rec = verdict_record(v, f.label)
        lines = [f"{f.label} under {rec['method']}: {rec['status']}"]
        if v.status == "converges":
            lines.append(f"  value   = {fmt12(v.value)}")
        if v.gap:
            lines.append(f"  gap     = [{fmt12(v.gap[0])}, {fmt12(v.gap[1])}]")
        lines.append(f"  upper   = {fmt12(v.upper)}")
        lines.append(f"  lower   = {fmt12(v.lower)}")
        lines.append(f"  tol     = {fmt12(v.tol)}")
        lines.append(f"  {v.diagnostics}")
        _emit("\n".join(lines) + "\n", cfg.out)
    return 0


def _cmd_chain(args, cfg: CliConfig) -> int:
    domain = DomainTag(args.domain) if args.domain else None
    f = _lookup(args.fn, domain)
    if args.kmax < 2:
        raise UsageError("--kmax must be at least 2")
    report = chain_report(f, args.kmax, cfg.verdict_tol,
                          windows=cfg.windows(), thetas=cfg.thetas(),
                          quad=cfg.quad(), l1_mode=cfg.log_cesaro_mode,
                          tower_k_max=cfg.tower_k_max)
    if cfg.format == "json":
        text = _json_text(report_to_dict(report))
    elif cfg.format == "csv":
        text = _csv_text(VERDICT_CSV_COLUMNS, report_csv_rows(report))
    else:
        lines = [f"chain report: {report.function} (tol {fmt12(report.tol)})"]
        for v in report.verdicts:
            rec = verdict_record(v, report.function)
            extra = (f" value={fmt12(v.value)}" if v.status == "converges"
                     else (f" gap=[{fmt12(v.gap[0])}, {fmt12(v.gap[1])}]"
                           if v.gap else ""))
            lines.append(f"  {rec['method']:>14}: {v.status:13}{extra}"
                         f"  (upper={fmt12(v.upper)}, lower={fmt12(v.lower)})")
        lines.append("checks:")
        for c in report.checks:
            mark = "pass" if c.passed else "FAIL"
            lines.append(f"  [{mark}] {c.name}: lhs={fmt12(c.lhs)} "
                         f"rhs={fmt12(c.rhs)} slack={fmt12(c.slack)}")
        text = "\n".join(lines) + "\n"
    _emit(text, cfg.out)
    if cfg.out and not args.no_plot:
        _tower_figure(report, Path(cfg.out).with_suffix(".png"))
    return 0


def _cmd_kernel(args, cfg: CliConfig) -> int:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    xs = np.linspace(args.x_from, args.x_to, max(args.points, 1))
    if args.points < 1:
        raise UsageError("points must be at least 1")
    if args.x_to < args.x_from:
        raise UsageError("--to must not precede --from")
    ys = np.asarray(gamma_kernel_eval(args.n, xs), dtype=float)
    return _trace_report(xs, ys, f"gamma kernel order {args.n}", cfg,
                         args.no_plot)


def run(argv=None) -> int:
    """Parse arguments and execute; returns the process exit code."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command == "corpus":
            return _cmd_corpus(args, cfg)
        if args.command == "eval":
            return _cmd_eval(args, cfg)
        if args.command == "verdict":
            return _cmd_verdict(args, cfg)
        if args.command == "chain":
            return _cmd_chain(args, cfg)
        if args.command == "kernel":
            return _cmd_kernel(args, cfg)
        raise UsageError(f"unknown command {args.command!r}")
    except (UsageError, DomainMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QuadratureError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
