"""Command-line front end.

Exit codes: 0 all checks pass, 1 a mathematical check failed (or a numeric
failure occurred), 2 usage, configuration or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

from . import __version__
from .exactq import verify_e7, verify_e7_range
from .limits import (FIELDS, F_eval, extrapolate, limit_scan, reflection_residual,
                     rogers_residual, xi0)
from .qnumeric import (LI2_ONE, BoundsReport, DomainError, NumericError,
                       PreconditionError, QParams, check_h_bound, check_sandwich_e13,
                       check_sandwich_e14, h_integral, h_sum, li2, ln_g, ln_phi,
                       log_derivative_g, verify_qbinomial)
from .skewalg import verify_pentagon

COMMANDS = ("verify-e7", "verify-pentagon", "eval", "bounds", "limit-scan", "rogers", "all")
FORMATS = ("text", "csv", "json")
K_LIMIT = 20

ROGERS_TOL = 1e-12 * (1 + LI2_ONE)
REFLECTION_TOL = 1e-13


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    q: float = 0.9
    a: float = 0.5
    z: float = 0.5
    x: float = 0.5
    degree: int = 8
    max_m: int = 10
    max_n: int = 10
    k_min: int = 4
    k_max: int = 14
    tol_rel: float = 1e-9
    fit_order: int = 2
    fit_log: bool = False
    format: str = "text"
    out: str | None = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}")
        for name in ("q", "a", "z"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ConfigError(f"--{name} must lie in (0, 1), got {v}")
        if not 0.0 < self.x < 1.0:
            raise ConfigError(f"--x must lie in (0, 1), got {self.x}")
        if self.degree < 0:
            raise ConfigError(f"--degree must be nonnegative, got {self.degree}")
        if self.max_m < 0 or self.max_n < 0:
            raise ConfigError("--max-m and --max-n must be nonnegative")
        if not 1 <= self.k_min <= self.k_max <= K_LIMIT:
            raise ConfigError(f"need 1 <= --k-min <= --k-max <= {K_LIMIT}")
        if not 0 <= self.fit_order <= 4:
            raise ConfigError("--fit-order must be between 0 and 4")
        if not (self.tol_rel > 0 and math.isfinite(self.tol_rel)):
            raise ConfigError("--tol-rel must be a positive number")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    columns: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _fmt(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "nan" if math.isnan(v) else f"{v:.17g}"
    return str(v)


def _json(v: Any) -> str:
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, float):
        return "null" if not math.isfinite(v) else f"{v:.17g}"
    if isinstance(v, (int, str)):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def render(report: Report, cfg: RunConfig) -> str:
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(report.columns)
        for row in report.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()
    if cfg.format == "json":
        meta = {
            "command": cfg.command,
            "config": {k: v for k, v in asdict(cfg).items() if k not in ("command", "format", "out")},
            "tolerances": {"tol_rel": cfg.tol_rel, "rogers": ROGERS_TOL,
                           "reflection": REFLECTION_TOL},
            "version": __version__,
        }
        doc = {
            "meta": meta,
            "columns": report.columns,
            "rows": [dict(zip(report.columns, row)) for row in report.rows],
            "checks": [asdict(c) for c in report.checks],
            "passed": report.passed,
        }
        return _json(doc) + "\n"
    lines = [f"# {cfg.command}"]
    if report.rows:
        lines.append("  ".join(report.columns))
        for row in report.rows:
            lines.append("  ".join(_fmt(v) for v in row))
    for c in report.checks:
        tag = "PASS" if c.passed else "FAIL"
        lines.append(f"[{tag}] {c.name}" + (f": {c.detail}" if c.detail else ""))
    lines.append("OK" if report.passed else "FAILED")
    return "\n".join(lines) + "\n"


def _bounds_check(r: BoundsReport) -> Check:
    return Check(r.label, r.passed, f"{r.lower:.17g} <= {r.value:.17g} <= {r.upper:.17g}")


def _params(cfg: RunConfig) -> QParams:
    return QParams(cfg.q, cfg.a, cfg.z, tol_rel=cfg.tol_rel)


def cmd_verify_e7(cfg: RunConfig) -> Report:
    res = verify_e7_range(cfg.max_m, cfg.max_n)
    rep = Report(["m", "n", "pass"])
    rep.rows = [[m, n, ok] for (m, n), ok in sorted(res.results.items())]
    fails = res.failures
    detail = f"max degree {res.max_degree}"
    if fails:
        detail += f"; first counterexample (m, n) = {fails[0]}"
    rep.checks.append(Check(f"coefficient identities m<={cfg.max_m} n<={cfg.max_n}",
                            res.passed, detail))
    return rep


def cmd_verify_pentagon(cfg: RunConfig) -> Report:
    res = verify_pentagon(cfg.degree)
    rep = Report(["n", "m", "pass"])
    rep.rows = [[n, m, ok] for (n, m), ok in sorted(res.coefficients.items())]
    detail = "" if res.passed else (
        f"first mismatch at v^{res.first_mismatch[0]} u^{res.first_mismatch[1]}")
    rep.checks.append(Check(f"quantum pentagon up to degree {cfg.degree}", res.passed, detail))
    return rep


def cmd_eval(cfg: RunConfig) -> Report:
    p = _params(cfg)
    x = cfg.x
    rep = Report(["quantity", "value"])
    rep.rows = [
        ["li2(x)", li2(x)],
        ["ln_phi(x)", ln_phi(x, p)],
        ["ln_g(x)", ln_g(x, p)],
        ["log_derivative_g(x)", log_derivative_g(x, p)],
        ["h_sum(x)", h_sum(x, p)],
        ["h_integral(x)", h_integral(x, p)],
    ]
    return rep


def cmd_bounds(cfg: RunConfig) -> Report:
    p = _params(cfg)
    reports = [check_sandwich_e13(cfg.x, p), check_h_bound(cfg.x, p), verify_qbinomial(p)]
    if p.unimodal_ok:
        reports.append(check_sandwich_e14(p))
    rep = Report(["label", "lower", "value", "upper", "pass"])
    for r in reports:
        rep.rows.append([r.label, r.lower, r.value, r.upper, r.passed])
        rep.checks.append(_bounds_check(r))
    if not p.unimodal_ok:
        rep.checks.append(Check("peak sandwich skipped", True,
                                f"q <= 1 - z(1-a) = {1 - p.z * (1 - p.a):.17g}"))
    return rep


def cmd_limit_scan(cfg: RunConfig) -> Report:
    recs = limit_scan(cfg.a, cfg.z, cfg.k_min, cfg.k_max, tol_rel=cfg.tol_rel)
    rep = Report(list(FIELDS))
    rep.rows = [[getattr(r, f) for f in FIELDS] for r in recs]
    live = [r for r in recs if not r.skipped]
    for r in recs:
        if r.skipped:
            rep.checks.append(Check(f"k={r.k} skipped", True, "q <= 1 - z(1-a)"))
    env_ok = all(abs(r.residual_R) <= r.envelope_R for r in live)
    rep.checks.append(Check("envelope |R - target_R| <= -ln q * sum(-ln(1-x))", env_ok))
    agree = max((abs(r.target_F - r.target_R) for r in recs), default=0.0)
    rep.checks.append(Check("target_F == target_R", agree <= 1e-11, f"max gap {agree:.3g}"))
    if len(live) >= 4:
        ex = extrapolate(live, order=cfg.fit_order, log_term=cfg.fit_log)
        F0 = F_eval(xi0(cfg.a, cfg.z), cfg.a, cfg.z)
        tol = 1e-4 * (1 + abs(F0))
        rep.checks.append(Check("extrapolated limit L* vs F(xi0)", abs(ex.value - F0) <= tol,
                                f"L*={ex.value:.17g} F={F0:.17g} fit residual {ex.fit_residual:.3g}"))
    return rep


def cmd_rogers(cfg: RunConfig) -> Report:
    rr = rogers_residual(cfg.a, cfg.z)
    fr = reflection_residual(cfg.x)
    rep = Report(["identity", "residual"])
    rep.rows = [["rogers", rr], ["reflection", fr]]
    rep.checks.append(Check(f"rogers a={cfg.a!r} z={cfg.z!r}", abs(rr) <= ROGERS_TOL,
                            f"residual {rr:.3g}"))
    rep.checks.append(Check(f"reflection x={cfg.x!r}", abs(fr) <= REFLECTION_TOL,
                            f"residual {fr:.3g}"))
    return rep


def cmd_all(cfg: RunConfig) -> Report:
    rep = Report(["check", "pass"])
    e7 = verify_e7_range(20, 20)
    rep.checks.append(Check("coefficient identities 20x20", e7.passed))
    pent = verify_pentagon(16)
    same = all(ok == verify_e7(m, n) for (n, m), ok in pent.coefficients.items())
    rep.checks.append(Check("quantum pentagon degree 16", pent.passed and same))
    grid = [i / 10 for i in range(1, 10)]
    qb_ok = sandwich_ok = True
    for q in (0.3, 0.5, 0.7, 0.9, 0.99):
        for a in grid:
            for z in grid:
                p = QParams(q, a, z, tol_rel=cfg.tol_rel)
                qb_ok &= verify_qbinomial(p).passed
                for x in (a, z, a * z, q):
                    sandwich_ok &= check_sandwich_e13(x, p).strict
    rep.checks.append(Check("q-binomial grid", qb_ok))
    rep.checks.append(Check("phi sandwich grid", sandwich_ok))
    e14 = all(check_sandwich_e14(QParams(1 - 2.0 ** -k)).strict for k in range(4, 11))
    rep.checks.append(Check("peak sandwich k=4..10", e14))
    scan = cmd_limit_scan(RunConfig("limit-scan", a=0.5, z=0.5, k_min=4, k_max=14,
                                    tol_rel=cfg.tol_rel))
    rep.checks.extend(scan.checks)
    rng = random.Random(0)
    worst = max(abs(rogers_residual(rng.uniform(1e-3, 1 - 1e-3), rng.uniform(1e-3, 1 - 1e-3)))
                for _ in range(100))
    rep.checks.append(Check("rogers 100 random pairs", worst <= 1e-11, f"max {worst:.3g}"))
    refl = max(abs(reflection_residual(i / 100)) for i in range(1, 100))
    rep.checks.append(Check("reflection 99-point grid", refl <= REFLECTION_TOL, f"max {refl:.3g}"))
    rep.rows = [[c.name, c.passed] for c in rep.checks]
    return rep


DISPATCH = {
    "verify-e7": cmd_verify_e7,
    "verify-pentagon": cmd_verify_pentagon,
    "eval": cmd_eval,
    "bounds": cmd_bounds,
    "limit-scan": cmd_limit_scan,
    "rogers": cmd_rogers,
    "all": cmd_all,
}


def run(cfg: RunConfig) -> int:
    try:
        cfg.validate()
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        report = DISPATCH[cfg.command](cfg)
    except PreconditionError as e:
        print(f"precondition violated: {e}", file=sys.stderr)
        return 2
    except DomainError as e:
        print(f"domain error: {e}", file=sys.stderr)
        return 2
    except NumericError as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return 1
    text = render(report, cfg)
    try:
        if cfg.out:
            with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return 2
    if not report.passed:
        for c in report.checks:
            if not c.passed:
                print(f"verification failed: {c.name} {c.detail}".rstrip(), file=sys.stderr)
                break
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=float, default=0.9)
    common.add_argument("--a", type=float, default=0.5)
    common.add_argument("--z", type=float, default=0.5)
    common.add_argument("--x", type=float, default=0.5)
    common.add_argument("--degree", type=int, default=8, help="pentagon truncation order")
    common.add_argument("--max-m", type=int, default=10)
    common.add_argument("--max-n", type=int, default=10)
    common.add_argument("--k-min", type=int, default=4, help="first k in q = 1 - 2^-k")
    common.add_argument("--k-max", type=int, default=14)
    common.add_argument("--tol-rel", type=float, default=1e-9)
    common.add_argument("--fit-order", type=int, default=2,
                        help="polynomial order in h of the limit extrapolation")
    common.add_argument("--fit-log", action="store_true",
                        help="add an h*ln(h) column to the extrapolation model")
    common.add_argument("--format", choices=FORMATS, default="text")
    common.add_argument("--out", metavar="PATH", default=None)
    parser = argparse.ArgumentParser(
        prog="qpentagon",
        description="Verify the q-binomial / quantum pentagon / Rogers dilogarithm chain.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    cfg = RunConfig(**{k: v for k, v in vars(ns).items()})
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
