"""Scenario runner: sweep rho, evaluate every metric by every method, emit CSV.

Scenario files are INI documents with a single ``[scenario]`` section::

    [scenario]
    name = my-run
    branches = 1:2.2, 0.98:2.3, 1.1:2.4     ; alpha:beta pairs, SNR domain
    gamma_th_db = 10
    rho_min_db = 0
    rho_max_db = 50
    step_db = 5
    samples = 200000                         ; optional from here on
    seed = 1
    batch = 100000
    delta = 0.5
    zeta = 0.25
    methods = exact_h, quadrature, asymptotic, monte_carlo

Identical branches may be given as ``alpha``, ``beta`` and ``iid_copies``
instead of ``branches``; the two forms are mutually exclusive.

Exit status: 0 when every row is consistent, 1 on a consistency failure,
2 on usage or configuration errors.
"""
from __future__ import annotations

import argparse
import ast
import configparser
import csv
import io
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import metrics as mt
from . import montecarlo as mc
from .loglogistic import BranchParams
from .metrics import Method, ModulationParams
from .sc_stats import ScModel

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "SweepRow",
    "BUILTIN_SCENARIOS",
    "CSV_HEADER",
    "METRICS",
    "load_config",
    "parse_config",
    "run_sweep",
    "emit_csv",
    "format_csv",
    "consistency_report",
    "main",
]

CSV_HEADER = (
    "rho_db",
    "metric",
    "exact_h",
    "quadrature",
    "asymptotic",
    "mc_estimate",
    "mc_stderr",
    "max_discrepancy",
)
METRICS = ("outage", "ber", "capacity")
ALL_METHODS = tuple(Method)
DEFAULT_TOLERANCE = 1e-4
MC_SIGMAS = 3.0
# MC comparisons need this many expected "events" (N * p) to mean anything
MC_MIN_EVENTS = 10.0


class ConfigError(ValueError):
    """Scenario file could not be parsed or failed validation."""


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    branches: tuple[tuple[float, float], ...]
    gamma_th_db: float
    sweep: tuple[float, float, float]
    iid_copies: int | None = None
    modulation: ModulationParams = ModulationParams()
    sim: mc.SimConfig = mc.SimConfig(samples=200_000, seed=1, batch=100_000)
    methods: tuple[Method, ...] = ALL_METHODS

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple((float(a), float(b)) for a, b in self.branches))
        object.__setattr__(self, "methods", tuple(Method(m) for m in self.methods))
        if not self.branches:
            raise ConfigError("branches: at least one branch is required")
        for a, b in self.branches:
            try:
                BranchParams(a, b)
            except ValueError as exc:
                raise ConfigError(f"branches: {exc}") from None
        if self.iid_copies is not None:
            if len(self.branches) != 1:
                raise ConfigError("iid_copies: expands exactly one branch, got several")
            if int(self.iid_copies) != self.iid_copies or self.iid_copies < 1:
                raise ConfigError(f"iid_copies: must be a positive integer, got {self.iid_copies!r}")
        lo, hi, step = self.sweep
        if not lo < hi:
            raise ConfigError(f"rho_min_db: must be below rho_max_db ({lo} >= {hi})")
        if not step > 0:
            raise ConfigError(f"step_db: must be > 0, got {step}")
        if not math.isfinite(self.gamma_th_db):
            raise ConfigError("gamma_th_db: must be finite")
        if not self.methods:
            raise ConfigError("methods: at least one method is required")

    @property
    def L(self) -> int:
        return self.iid_copies if self.iid_copies is not None else len(self.branches)

    @property
    def gamma_th(self) -> float:
        return float(mt.db_to_linear(self.gamma_th_db))

    def rho_points_db(self) -> list[float]:
        lo, hi, step = self.sweep
        n = int(math.floor((hi - lo) / step + 1e-9))
        return [lo + k * step for k in range(n + 1)]

    def model(self, rho_db: float) -> ScModel:
        rho = float(mt.db_to_linear(rho_db))
        if self.iid_copies is not None:
            return ScModel.identical(BranchParams(*self.branches[0]), self.iid_copies, rho)
        return ScModel.from_pairs(self.branches, rho)


def _scenario2(L: int) -> ScenarioConfig:
    return ScenarioConfig(
        name=f"scenario2-L{L}",
        branches=((0.9724, 2.3311),),
        iid_copies=L,
        gamma_th_db=10.0,
        sweep=(0.0, 50.0, 5.0),
    )


BUILTIN_SCENARIOS = {
    "scenario1": ScenarioConfig(
        name="scenario1",
        branches=((1.0, 2.2), (0.98, 2.3), (1.1, 2.4)),
        gamma_th_db=10.0,
        sweep=(0.0, 50.0, 5.0),
    ),
    "scenario2-L1": _scenario2(1),
    "scenario2-L2": _scenario2(2),
    "scenario2-L4": _scenario2(4),
}


# --------------------------------------------------------------------------
# config parsing


def _number(sec, key, kind=float, default=None):
    if key not in sec:
        if default is None:
            raise ConfigError(f"{key}: missing required field")
        return default
    raw = sec[key].strip()
    try:
        value = kind(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected {kind.__name__}, got {raw!r}") from None
    if kind is float and not math.isfinite(value):
        raise ConfigError(f"{key}: must be finite, got {raw!r}")
    return value


def _list(raw: str) -> list[str]:
    return [p.strip() for p in raw.split(",") if p.strip()]


def _parse_branches(raw: str):
    out = []
    for item in _list(raw):
        parts = item.split(":")
        if len(parts) != 2:
            raise ConfigError(f"branches: expected alpha:beta, got {item!r}")
        try:
            out.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise ConfigError(f"branches: expected numbers in {item!r}") from None
    return tuple(out)


def parse_methods(raw) -> tuple[Method, ...]:
    names = _list(raw) if isinstance(raw, str) else list(raw)
    try:
        return tuple(Method(n) for n in names)
    except ValueError:
        valid = ", ".join(m.value for m in Method)
        raise ConfigError(f"methods: unknown method in {names!r} (valid: {valid})") from None


_KNOWN_KEYS = {
    "name", "branches", "alpha", "beta", "iid_copies", "gamma_th_db", "rho_min_db",
    "rho_max_db", "step_db", "samples", "seed", "batch", "delta", "zeta", "methods",
}


def parse_config(text: str, source: str = "<string>") -> ScenarioConfig:
    """Parse and validate the INI text of a scenario."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    try:
        cp.read_string(text, source=source)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError(f"{source}: line {exc.lineno}: expected a [scenario] header first") from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        # configparser stores repr(line); recover the raw text for the message
        text = ast.literal_eval(line).strip()
        raise ConfigError(f"{source}: line {lineno}: cannot parse {text!r}") from None
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        what = getattr(exc, "option", None) or exc.section
        raise ConfigError(f"{source}: line {exc.lineno}: duplicate {what!r}") from None
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc.message}") from None
    if not cp.has_section("scenario"):
        raise ConfigError(f"{source}: missing [scenario] section")
    sec = cp["scenario"]
    unknown = sorted(set(sec) - _KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown field")

    has_list = "branches" in sec
    has_iid = any(k in sec for k in ("alpha", "beta", "iid_copies"))
    if has_list and has_iid:
        raise ConfigError("branches: give either branches or alpha/beta/iid_copies, not both")
    if has_list:
        branches, copies = _parse_branches(sec["branches"]), None
    elif has_iid:
        branches = ((_number(sec, "alpha"), _number(sec, "beta")),)
        copies = _number(sec, "iid_copies", int)
    else:
        raise ConfigError("branches: missing required field (or alpha/beta/iid_copies)")

    base = ScenarioConfig.__dataclass_fields__
    try:
        sim = mc.SimConfig(
            samples=_number(sec, "samples", int, base["sim"].default.samples),
            seed=_number(sec, "seed", int, base["sim"].default.seed),
            batch=_number(sec, "batch", int, base["sim"].default.batch),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"samples/seed/batch: {exc}") from None
    try:
        mod = ModulationParams(_number(sec, "delta", float, 0.5), _number(sec, "zeta", float, 0.25))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"delta/zeta: {exc}") from None
    methods = parse_methods(sec["methods"]) if "methods" in sec else ALL_METHODS
    return ScenarioConfig(
        name=sec.get("name", os.path.splitext(os.path.basename(source))[0]).strip(),
        branches=branches,
        iid_copies=copies,
        gamma_th_db=_number(sec, "gamma_th_db"),
        sweep=(_number(sec, "rho_min_db"), _number(sec, "rho_max_db"), _number(sec, "step_db")),
        modulation=mod,
        sim=sim,
        methods=methods,
    )


def load_config(path_or_name: str) -> ScenarioConfig:
    """Load a built-in scenario by name, or an INI scenario file by path."""
    if path_or_name in BUILTIN_SCENARIOS:
        return BUILTIN_SCENARIOS[path_or_name]
    try:
        with open(path_or_name, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        known = ", ".join(BUILTIN_SCENARIOS)
        raise ConfigError(f"{path_or_name}: not a built-in scenario ({known}) and unreadable: {exc.strerror}") from None
    return parse_config(text, path_or_name)


# --------------------------------------------------------------------------
# sweep


@dataclass
class SweepRow:
    rho_db: float
    metric: str
    values: dict = field(default_factory=dict)  # Method -> float
    errors: dict = field(default_factory=dict)  # Method -> message
    mc_stderr: float | None = None
    mc_samples: int | None = None
    max_discrepancy: float | None = None

    def get(self, method: Method):
        return self.values.get(method)


def _paths(metric: str, cfg: ScenarioConfig, model: ScModel, sim: mc.SimConfig, workers: int):
    """Callables per method for one (rho, metric) cell; ``None`` means not available."""
    iid = model.iid()
    mod = cfg.modulation
    g = cfg.gamma_th
    if metric == "outage":
        return {
            # the closed-form product CDF is the reference for the H-function CDF
            Method.EXACT_H: lambda: mt.outage_foxh(model, g),
            Method.QUADRATURE: lambda: mt.outage(model, g),
            Method.ASYMPTOTIC: lambda: mt.outage_asymptotic(model, g),
            Method.MONTE_CARLO: lambda: mc.estimate_outage(model, g, sim, workers),
        }
    if metric == "ber":
        return {
            Method.EXACT_H: (lambda: mt.ber_exact_iid(model, mod)) if iid else (lambda: mt.ber_exact_inid(model, mod)),
            Method.QUADRATURE: lambda: mt.ber_quadrature(model, mod),
            Method.ASYMPTOTIC: lambda: mt.ber_asymptotic(model, mod),
            Method.MONTE_CARLO: lambda: mc.estimate_ber(model, mod, sim, workers),
        }
    if metric == "capacity":
        return {
            Method.EXACT_H: (lambda: mt.capacity_exact_iid(model)) if iid else (lambda: mt.capacity_exact_inid(model)),
            Method.QUADRATURE: lambda: mt.capacity_quadrature(model),
            Method.ASYMPTOTIC: (lambda: mt.capacity_asymptotic_iid(model)) if iid else None,
            Method.MONTE_CARLO: lambda: mc.estimate_capacity(model, sim, workers),
        }
    raise ValueError(f"unknown metric {metric!r}")


def _discrepancy(row: SweepRow):
    """Largest pairwise relative gap among the deterministic non-asymptotic methods.

    Asymptotes are only meant to agree at high rho, and Monte Carlo is judged
    against its own standard error, so neither enters this number.
    """
    vals = [row.values[m] for m in (Method.EXACT_H, Method.QUADRATURE) if m in row.values]
    if len(vals) < 2:
        return None
    ref = row.values.get(Method.QUADRATURE, vals[0])
    gap = max(vals) - min(vals)
    if ref == 0:
        return 0.0 if gap == 0 else math.inf
    return gap / abs(ref)


def _run_point(cfg: ScenarioConfig, k: int, rho_db: float, metrics, methods, mc_workers: int):
    model = cfg.model(rho_db)
    rows = []
    for j, metric in enumerate(metrics):
        row = SweepRow(rho_db, metric)
        sim = cfg.sim.with_key(k, METRICS.index(metric))
        for method, fn in _paths(metric, cfg, model, sim, mc_workers).items():
            if method not in methods or fn is None:
                continue
            try:
                res = fn()
            except Exception as exc:  # recorded in-row, the sweep goes on
                row.errors[method] = f"{type(exc).__name__}: {exc}"
                continue
            row.values[method] = float(res.value)
            if method is Method.MONTE_CARLO:
                row.mc_stderr = res.error_estimate
                row.mc_samples = res.n_samples
        row.max_discrepancy = _discrepancy(row)
        rows.append(row)
    return rows


def run_sweep(
    cfg: ScenarioConfig,
    metrics=METRICS,
    methods=None,
    workers: int = 1,
) -> list[SweepRow]:
    """One row per (rho point, metric), ordered by rho then metric."""
    metrics = tuple(metrics)
    for m in metrics:
        if m not in METRICS:
            raise ConfigError(f"metrics: unknown metric {m!r} (valid: {', '.join(METRICS)})")
    methods = cfg.methods if methods is None else tuple(Method(m) for m in methods)
    points = cfg.rho_points_db()
    if workers <= 1:
        chunks = [_run_point(cfg, k, r, metrics, methods, 1) for k, r in enumerate(points)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda kr: _run_point(cfg, kr[0], kr[1], metrics, methods, 1), enumerate(points)))
    return [row for chunk in chunks for row in chunk]


# --------------------------------------------------------------------------
# output


def _fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".12g")


def _cell(row: SweepRow, method: Method) -> str:
    if method in row.errors:
        return "error"
    return _fmt(row.values.get(method))


def format_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(
            [
                _fmt(r.rho_db),
                r.metric,
                _cell(r, Method.EXACT_H),
                _cell(r, Method.QUADRATURE),
                _cell(r, Method.ASYMPTOTIC),
                _cell(r, Method.MONTE_CARLO),
                _fmt(r.mc_stderr),
                _fmt(r.max_discrepancy),
            ]
        )
    return buf.getvalue()


def emit_csv(rows, path) -> None:
    """Write the table as CSV to ``path`` ('-' for stdout)."""
    text = format_csv(rows)
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _mc_resolvable(row: SweepRow, ref: float, delta: float) -> bool:
    if row.mc_samples is None:
        return False
    if row.metric == "outage":
        p = min(ref, 1.0 - ref)
    elif row.metric == "ber":
        p = ref / delta
    else:
        return True
    return row.mc_samples * p >= MC_MIN_EVENTS


def consistency_report(
    rows, tolerance: float = DEFAULT_TOLERANCE, stream=None, delta: float = 0.5
) -> int:
    """Print one verdict per row and return the exit status (0 pass, 1 fail)."""
    stream = sys.stderr if stream is None else stream
    rows = list(rows)
    if not rows:
        print("warning: empty table, nothing to check (vacuous pass)", file=stream)
        return 0
    failures = 0
    for r in rows:
        problems = [f"{m.value} failed ({msg})" for m, msg in r.errors.items()]
        if r.max_discrepancy is not None and not r.max_discrepancy <= tolerance:
            problems.append(f"exact/quadrature gap {r.max_discrepancy:.3g} > {tolerance:g}")
        est = r.values.get(Method.MONTE_CARLO)
        ref = r.values.get(Method.QUADRATURE, r.values.get(Method.EXACT_H))
        note = ""
        if est is not None and ref is not None:
            if _mc_resolvable(r, ref, delta):
                z = abs(est - ref) / r.mc_stderr if r.mc_stderr else (0.0 if est == ref else math.inf)
                if z > MC_SIGMAS:
                    problems.append(f"Monte Carlo off by {z:.2f} sigma")
            else:
                note = " (Monte Carlo unresolved at this sample size)"
        status = "FAIL" if problems else "ok"
        detail = "; ".join(problems) if problems else "consistent" + note
        print(f"{status:4s} rho={_fmt(r.rho_db)} dB {r.metric}: {detail}", file=stream)
        failures += bool(problems)
    print(f"{len(rows) - failures}/{len(rows)} rows consistent", file=stream)
    return 1 if failures else 0


# --------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="llsc",
        description="Sweep the average transmit SNR of an SC receiver over log-logistic "
        "branches and cross-check outage, BER and capacity by every method.",
    )
    p.add_argument("--scenario", default="scenario1",
                   help=f"built-in name ({', '.join(BUILTIN_SCENARIOS)}) or INI file path")
    p.add_argument("--metrics", default=",".join(METRICS), help="comma list from outage,ber,capacity")
    p.add_argument("--methods", default=None, help="comma list from " + ",".join(m.value for m in Method))
    p.add_argument("--out", default="-", help="CSV destination ('-' = stdout)")
    p.add_argument("--seed", type=int, default=None, help="override the Monte Carlo seed")
    p.add_argument("--samples", type=int, default=None, help="override the Monte Carlo sample count")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE,
                   help="relative exact-vs-quadrature tolerance")
    p.add_argument("--workers", type=int, default=1, help="threads for sweep points")
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.scenario)
        if args.seed is not None or args.samples is not None:
            sim = cfg.sim
            try:
                sim = mc.SimConfig(
                    samples=sim.samples if args.samples is None else args.samples,
                    seed=sim.seed if args.seed is None else args.seed,
                    batch=sim.batch,
                )
            except ValueError as exc:
                raise ConfigError(f"--seed/--samples: {exc}") from None
            cfg = replace(cfg, sim=sim)
        metrics = _list(args.metrics)
        methods = parse_methods(args.methods) if args.methods is not None else None
        if not args.tolerance > 0:
            raise ConfigError("--tolerance: must be > 0")
        if args.workers < 1:
            raise ConfigError("--workers: must be >= 1")
        rows = run_sweep(cfg, metrics, methods, workers=args.workers)
    except ConfigError as exc:
        print(f"llsc: error: {exc}", file=sys.stderr)
        return 2
    try:
        emit_csv(rows, args.out)
    except OSError as exc:
        print(f"llsc: error: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
        return 2
    return consistency_report(rows, args.tolerance, delta=cfg.modulation.delta)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
