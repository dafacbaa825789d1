"""Command-line front end: sweeps, oracle comparisons and plots.

Everything is reported in reduced units: time as ``ct/d``, energy in units
of ``eps0 = mu^2 / (12 pi d^3)`` and force in units of ``eps0 / d``.

Configuration files are either JSON or a key/value text format::

    # top-level keys
    scenario = dressed2
    x0 = 1.0
    x0p = 1.2
    rho = 0.5

    [time_grid]
    start = 0.1
    stop = 6
    count = 200
    spacing = linear

    [oracle]
    kind = quadrature
    tol = 1e-6

    [plot]
    path = run.svg

Command-line flags override file values.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np

from . import cavity
from .kernels import NonConvergenceError
from .params import PRESETS, DomainError, PhysicalParams, energy_unit
from .scenarios import (
    ScenarioKind,
    StepCollisionError,
    asymptote_check,
    echo_times,
    energy,
    energy_quadrature,
    force,
    sign_changes,
)
from .svgplot import Series, emit_plot

__all__ = [
    "ConfigError",
    "ConfigParseError",
    "ConfigValidationError",
    "TimeGrid",
    "OracleSpec",
    "PlotSpec",
    "RunConfig",
    "ResultRow",
    "CSV_COLUMNS",
    "parse_config",
    "load_raw_config",
    "build_config",
    "compute_rows",
    "format_csv",
    "run",
    "main",
]

CSV_COLUMNS = (
    "t_over_d",
    "energy_over_eps0",
    "force_d_over_eps0",
    "diverged",
    "term1",
    "term2",
    "term3",
)
OUTPUTS = ("energy", "force", "sign_changes", "asymptote")
EXIT_OK, EXIT_USAGE, EXIT_ORACLE, EXIT_IO = 0, 1, 2, 3

_DIMENSIONLESS = ("x0", "x0p", "rho")
_DIMENSIONAL = ("mu", "k0", "k0_prime", "d", "d_prime")
_TOP_KEYS = {
    "scenario": str,
    "x0": float,
    "x0p": float,
    "rho": float,
    "mu": float,
    "k0": float,
    "k0_prime": float,
    "d": float,
    "d_prime": float,
    "outputs": list,
    "output_format": str,
    "out": str,
    "threads": int,
}
_SECTIONS = {
    "time_grid": {"start": float, "stop": float, "count": int, "spacing": str},
    "oracle": {"kind": str, "tol": float},
    "plot": {"path": str, "width": int, "height": int},
}


class ConfigError(ValueError):
    pass


class ConfigParseError(ConfigError):
    pass


class ConfigValidationError(ConfigError):
    def __init__(self, fieldname: str, message: str) -> None:
        super().__init__(f"{fieldname}: {message}")
        self.field = fieldname


@dataclass(frozen=True)
class TimeGrid:
    start: float = 0.0
    stop: float = 6.0
    count: int = 100
    spacing: str = "linear"

    def points(self) -> list[float]:
        if self.count == 1:
            return [self.start]
        if self.spacing == "log":
            return [float(v) for v in np.geomspace(self.start, self.stop, self.count)]
        return [float(v) for v in np.linspace(self.start, self.stop, self.count)]


@dataclass(frozen=True)
class OracleSpec:
    kind: str
    tol: float


@dataclass(frozen=True)
class PlotSpec:
    path: str
    width: int = 640
    height: int = 400


@dataclass(frozen=True)
class RunConfig:
    scenario: ScenarioKind
    params: PhysicalParams
    time_grid: TimeGrid = TimeGrid()
    outputs: frozenset = frozenset({"energy", "force"})
    oracle: Optional[OracleSpec] = None
    output_format: str = "csv"
    plot: Optional[PlotSpec] = None
    out: Optional[str] = None
    threads: int = 1


@dataclass(frozen=True)
class ResultRow:
    t_over_d: float
    energy_over_eps0: Optional[float]
    force_d_over_eps0: Optional[float]
    diverged: bool
    terms: tuple[Optional[float], Optional[float], Optional[float]]
    low_confidence: bool = False


# -- configuration ----------------------------------------------------------------


def _convert(fieldname: str, kind: type, value: Any) -> Any:
    try:
        if kind is list:
            if isinstance(value, str):
                return [v.strip() for v in value.split(",") if v.strip()]
            if isinstance(value, (list, tuple)):
                return [str(v) for v in value]
            raise TypeError
        if kind is int:
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise TypeError
            return int(value)
        if kind is float:
            if isinstance(value, bool):
                raise TypeError
            return float(value)
        if not isinstance(value, str):
            raise TypeError
        return value
    except (TypeError, ValueError):
        raise ConfigValidationError(fieldname, f"expected {kind.__name__}, got {value!r}") from None


def load_raw_config(source: str) -> dict:
    """Parse JSON or key/value text into a nested dict of typed values."""
    text = source.strip()
    if text.startswith("{"):
        try:
            raw = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ConfigParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        if not isinstance(raw, dict):
            raise ConfigParseError("line 1, column 1: top level must be an object")
    else:
        parser = configparser.ConfigParser(
            interpolation=None, comment_prefixes=("#", ";"), inline_comment_prefixes=("#", ";")
        )
        parser.optionxform = str  # keep key case
        try:
            parser.read_string("[__top__]\n" + source)
        except configparser.ParsingError as exc:
            lineno, line = exc.errors[0]
            text = line.strip("'").replace("\\n", "").strip()
            raise ConfigParseError(f"line {lineno - 1}: cannot parse {text!r}") from None
        except configparser.DuplicateOptionError as exc:
            raise ConfigParseError(f"line {exc.lineno - 1}: duplicate key {exc.option!r}") from None
        except configparser.DuplicateSectionError as exc:
            raise ConfigParseError(f"line {exc.lineno - 1}: duplicate section {exc.section!r}") from None
        except configparser.Error as exc:
            lineno = getattr(exc, "lineno", None)
            where = f"line {lineno - 1}: " if lineno else ""
            raise ConfigParseError(f"{where}{exc.message.splitlines()[0]}") from None
        raw = dict(parser["__top__"])
        for name in parser.sections():
            if name == "__top__":
                continue
            raw[name] = dict(parser[name])
    return _typed(raw)


def _typed(raw: dict) -> dict:
    out: dict = {}
    for key, value in raw.items():
        if key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigValidationError(key, "expected a section")
            sub = {}
            for k, v in value.items():
                if k not in _SECTIONS[key]:
                    raise ConfigValidationError(f"{key}.{k}", "unknown key")
                sub[k] = _convert(f"{key}.{k}", _SECTIONS[key][k], v)
            out[key] = sub
        elif key in _TOP_KEYS:
            out[key] = _convert(key, _TOP_KEYS[key], value)
        else:
            raise ConfigValidationError(key, "unknown key")
    return out


def _positive(fieldname: str, value: float) -> float:
    if not (math.isfinite(value) and value > 0):
        raise ConfigValidationError(fieldname, f"must be > 0, got {value!r}")
    return value


def build_config(raw: dict) -> RunConfig:
    """Validate a typed mapping and fill defaults."""
    try:
        scenario = ScenarioKind.parse(raw.get("scenario", "bare"))
    except ValueError as exc:
        raise ConfigValidationError("scenario", str(exc)) from None

    has_dimless = any(k in raw for k in _DIMENSIONLESS)
    has_dim = any(k in raw for k in _DIMENSIONAL)
    if has_dimless == has_dim:
        raise ConfigValidationError("params", "specify exactly one parameterization")
    if has_dimless:
        if "x0" not in raw:
            raise ConfigValidationError("x0", "required")
        x0 = _positive("x0", raw["x0"])
        x0p = _positive("x0p", raw.get("x0p", x0))
        rho = _positive("rho", raw.get("rho", 1.0))
        params = PhysicalParams(mu=1.0, k0=x0, k0_prime=x0p, d=1.0, d_prime=rho)
    else:
        for key in ("k0", "d"):
            if key not in raw:
                raise ConfigValidationError(key, "required")
        vals = {k: _positive(k, raw[k]) for k in _DIMENSIONAL if k in raw}
        params = PhysicalParams(
            mu=vals.get("mu", 1.0),
            k0=vals["k0"],
            k0_prime=vals.get("k0_prime", vals["k0"]),
            d=vals["d"],
            d_prime=vals.get("d_prime", vals["d"]),
        )

    tg = raw.get("time_grid", {})
    grid = TimeGrid(
        start=tg.get("start", 0.0),
        stop=tg.get("stop", 6.0),
        count=tg.get("count", 100),
        spacing=tg.get("spacing", "linear"),
    )
    if grid.count < 1:
        raise ConfigValidationError("time_grid.count", "must be >= 1")
    if not (math.isfinite(grid.start) and grid.start >= 0):
        raise ConfigValidationError("time_grid.start", "must be >= 0")
    if not (math.isfinite(grid.stop) and grid.stop > grid.start):
        raise ConfigValidationError("time_grid.stop", "must be greater than start")
    if grid.spacing not in ("linear", "log"):
        raise ConfigValidationError("time_grid.spacing", "must be linear or log")
    if grid.spacing == "log" and grid.start <= 0:
        raise ConfigValidationError("time_grid.start", "log spacing needs start > 0")

    outputs = raw.get("outputs", ["energy", "force"])
    for o in outputs:
        if o not in OUTPUTS:
            raise ConfigValidationError("outputs", f"unknown output {o!r}")

    oracle = None
    osec = raw.get("oracle")
    if osec and osec.get("kind", "none") != "none":
        kind = osec["kind"]
        if kind not in ("quadrature", "cavity"):
            raise ConfigValidationError("oracle.kind", "must be quadrature, cavity or none")
        if kind == "cavity" and scenario is not ScenarioKind.BARE:
            raise ConfigValidationError("oracle.kind", "the cavity oracle covers the bare scenario only")
        tol = osec.get("tol", 1e-6 if kind == "quadrature" else 0.02)
        oracle = OracleSpec(kind, _positive("oracle.tol", tol))

    fmt = raw.get("output_format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigValidationError("output_format", "must be csv or json")

    plot = None
    if "plot" in raw:
        psec = raw["plot"]
        if "path" not in psec:
            raise ConfigValidationError("plot.path", "required")
        plot = PlotSpec(
            psec["path"],
            int(_positive("plot.width", psec.get("width", 640))),
            int(_positive("plot.height", psec.get("height", 400))),
        )

    threads = raw.get("threads", 1)
    if threads < 1:
        raise ConfigValidationError("threads", "must be >= 1")
    return RunConfig(
        scenario, params, grid, frozenset(outputs), oracle, fmt, plot, raw.get("out"), threads
    )


def parse_config(source: str) -> RunConfig:
    return build_config(load_raw_config(source))


# -- computation --------------------------------------------------------------------


def _row(cfg: RunConfig, s: float) -> ResultRow:
    p = cfg.params
    eps0 = energy_unit(p.mu, p.d)
    t = s * p.d
    sample = energy(cfg.scenario, p, t)
    terms: list[Optional[float]] = [None, None, None]
    for i, (v, div) in enumerate(zip(sample.terms, sample.term_diverged)):
        terms[i] = None if div else v / eps0
    e = None if sample.diverged or "energy" not in cfg.outputs else sample.energy / eps0
    f = None
    if "force" in cfg.outputs and not sample.diverged:
        try:
            f = force(cfg.scenario, p, t).force * p.d / eps0
        except StepCollisionError:
            f = None
    return ResultRow(s, e, f, sample.diverged, tuple(terms), sample.low_confidence)


def compute_rows(cfg: RunConfig) -> list[ResultRow]:
    """Rows in grid order; points are independent so threads cannot change them."""
    grid = cfg.time_grid.points()
    if cfg.threads == 1:
        return [_row(cfg, s) for s in grid]
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        return list(pool.map(lambda s: _row(cfg, s), grid))


def _cell(v: Optional[float]) -> str:
    return "" if v is None else repr(float(v))


def format_csv(rows: Sequence[ResultRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(
            [
                repr(float(r.t_over_d)),
                _cell(r.energy_over_eps0),
                _cell(r.force_d_over_eps0),
                "true" if r.diverged else "false",
                *(_cell(v) for v in r.terms),
            ]
        )
    return buf.getvalue()


def _row_dict(r: ResultRow) -> dict:
    return {
        "t_over_d": r.t_over_d,
        "energy_over_eps0": r.energy_over_eps0,
        "force_d_over_eps0": r.force_d_over_eps0,
        "diverged": r.diverged,
        "term1": r.terms[0],
        "term2": r.terms[1],
        "term3": r.terms[2],
        "low_confidence": r.low_confidence,
    }


def _oracle_summary(cfg: RunConfig, rows: Sequence[ResultRow]) -> dict:
    p = cfg.params
    eps0 = energy_unit(p.mu, p.d)
    spec = cfg.oracle
    assert spec is not None
    worst = 0.0
    checked = 0
    failures = []
    for r in rows:
        if r.diverged:
            continue
        t = r.t_over_d * p.d
        ref = energy(cfg.scenario, p, t).energy
        try:
            if spec.kind == "quadrature":
                other = energy_quadrature(cfg.scenario, p, t).energy
                dev = abs(other - ref) / max(abs(ref), 1e-12 * eps0)
            else:
                if t == 0:
                    other = cavity.bare_expectation_sum(
                        cavity.reference_ladder(p.d)[-1], p, 0.0, threads=cfg.threads
                    )
                    dev = abs(other) / eps0
                else:
                    rep = cavity.convergence_study(
                        cavity.reference_ladder(p.d), p, t, threads=cfg.threads
                    )
                    dev = rep.relative_deviation
        except (NonConvergenceError, DomainError) as exc:
            failures.append({"t_over_d": r.t_over_d, "error": str(exc)})
            continue
        checked += 1
        worst = max(worst, dev)
    passed = not failures and worst <= spec.tol
    return {
        "oracle": spec.kind,
        "points": checked,
        "max_rel_dev": worst,
        "tol": spec.tol,
        "status": "pass" if passed else "fail",
        "failures": failures,
    }


def _extras(cfg: RunConfig) -> dict:
    p = cfg.params
    out: dict = {}
    if "sign_changes" in cfg.outputs:
        grid = [s * p.d for s in cfg.time_grid.points()]
        roots = sign_changes(cfg.scenario, p, grid) if len(grid) > 1 else []
        out["sign_changes_t_over_d"] = [t / p.d for t in roots]
    if "asymptote" in cfg.outputs:
        horizon = cfg.time_grid.stop * p.d
        rep = asymptote_check(cfg.scenario, p, horizon)
        eps0 = energy_unit(p.mu, p.d)
        out["asymptote"] = {
            "horizon_t_over_d": cfg.time_grid.stop,
            "static_energy_over_eps0": rep.static_energy / eps0,
            "sup_deviation_over_eps0": rep.sup_deviation / eps0,
            "converged": rep.converged,
            "note": rep.note,
        }
    return out


def light_cone_windows(cfg: RunConfig, width: float = 1e-3) -> list[tuple[float, float]]:
    """Divergence windows in ct/d units."""
    p = cfg.params
    return [
        (T / p.d * (1 - width), T / p.d * (1 + width)) for T in echo_times(cfg.scenario, p)
    ]


def render_plot(cfg: RunConfig, rows: Sequence[ResultRow]) -> str:
    xs = [r.t_over_d for r in rows]
    series = []
    if "energy" in cfg.outputs:
        ys = [math.nan if r.energy_over_eps0 is None else r.energy_over_eps0 for r in rows]
        series.append(Series(xs, ys, [r.energy_over_eps0 is None for r in rows], "E/eps0"))
    if "force" in cfg.outputs:
        ys = [math.nan if r.force_d_over_eps0 is None else r.force_d_over_eps0 for r in rows]
        series.append(Series(xs, ys, [r.force_d_over_eps0 is None for r in rows], "F d/eps0"))
    width, height = (cfg.plot.width, cfg.plot.height) if cfg.plot else (640, 400)
    return emit_plot(
        series,
        windows=light_cone_windows(cfg),
        width=width,
        height=height,
        title=f"{cfg.scenario.value}",
    )


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def run(cfg: RunConfig) -> int:
    """Compute, write outputs, and return the exit code."""
    rows = compute_rows(cfg)
    summary = _extras(cfg)
    oracle = _oracle_summary(cfg, rows) if cfg.oracle else None
    if cfg.output_format == "json":
        doc = {
            "scenario": cfg.scenario.value,
            "columns": list(CSV_COLUMNS),
            "rows": [_row_dict(r) for r in rows],
            **summary,
        }
        if oracle:
            doc["oracle_summary"] = oracle
        text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    else:
        text = format_csv(rows)
    try:
        _write(cfg.out, text)
        if cfg.plot:
            _write(cfg.plot.path, render_plot(cfg, rows))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    info = sys.stderr if cfg.out in (None, "-") else sys.stdout
    if cfg.output_format == "csv":
        for key, value in summary.items():
            print(f"{key} = {json.dumps(value)}", file=info)
    if oracle:
        print(
            f"oracle={oracle['oracle']} points={oracle['points']} "
            f"max_rel_dev={oracle['max_rel_dev']:.3e} tol={oracle['tol']:g} "
            f"status={oracle['status']}",
            file=info,
        )
        for fail in oracle["failures"]:
            print(f"  t_over_d={fail['t_over_d']!r}: {fail['error']}", file=info)
        if oracle["status"] != "pass":
            return EXIT_ORACLE
    return EXIT_OK


# -- argument handling ----------------------------------------------------------------


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with 2
        raise _UsageError(message)


def _common(p: argparse.ArgumentParser, *, grid: bool = True) -> None:
    p.add_argument("--config", help="JSON or key/value configuration file")
    p.add_argument("--scenario", help="bare | dressed1 | dressed2")
    p.add_argument("--x0", type=float, help="k0 d")
    p.add_argument("--x0p", type=float, help="k0' d")
    p.add_argument("--rho", type=float, help="d'/d")
    if grid:
        p.add_argument("--t", type=float, dest="t_single", help="single time ct/d")
        p.add_argument("--t-start", type=float)
        p.add_argument("--t-stop", type=float)
        p.add_argument("--t-count", type=int)
        p.add_argument("--log-time", action="store_true", default=None)
        p.add_argument("--oracle", choices=("quadrature", "cavity", "none"))
        p.add_argument("--plot", help="write an SVG plot here")
    p.add_argument("--tol", type=float)
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), dest="fmt")
    p.add_argument("--threads", type=int)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cp-dynamics", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, helptext in (
        ("energy", "energy/eps0 on a time grid"),
        ("force", "force d/eps0 on a time grid"),
        ("sweep", "energy, force and per-term breakdown"),
        ("oracle", "sweep plus an independent oracle comparison"),
    ):
        _common(sub.add_parser(name, help=helptext))
    cav = sub.add_parser("cavity-check", help="discrete cavity-mode convergence study")
    _common(cav, grid=False)
    cav.add_argument("--t", type=float, dest="t_single", default=0.8, help="time ct/d")
    pre = sub.add_parser("presets", help="list parameter presets")
    pre.add_argument("--format", choices=("csv", "json"), dest="fmt")
    return parser


def _merge_flags(raw: dict, ns: argparse.Namespace, command: str) -> dict:
    raw = {k: (dict(v) if isinstance(v, dict) else v) for k, v in raw.items()}
    for key in ("scenario", "x0", "x0p", "rho"):
        val = getattr(ns, key, None)
        if val is not None:
            raw[key] = val
    tg = raw.setdefault("time_grid", {})
    if getattr(ns, "t_single", None) is not None and command != "cavity-check":
        tg.update(start=ns.t_single, stop=ns.t_single + 1.0, count=1)
    for flag, key in (("t_start", "start"), ("t_stop", "stop"), ("t_count", "count")):
        val = getattr(ns, flag, None)
        if val is not None:
            tg[key] = val
    if getattr(ns, "log_time", None):
        tg["spacing"] = "log"
    if not tg:
        raw.pop("time_grid")
    oracle_kind = getattr(ns, "oracle", None)
    if command == "oracle" and oracle_kind is None and "oracle" not in raw:
        oracle_kind = "quadrature"
    if oracle_kind is not None:
        raw.setdefault("oracle", {})["kind"] = oracle_kind
    if ns.tol is not None:
        raw.setdefault("oracle", {})["tol"] = ns.tol
    if getattr(ns, "plot", None):
        raw.setdefault("plot", {})["path"] = ns.plot
    if ns.out is not None:
        raw["out"] = ns.out
    if ns.fmt is not None:
        raw["output_format"] = ns.fmt
    threads = ns.threads
    if threads is None and "threads" not in raw:
        env = os.environ.get("CP_DYNAMICS_THREADS")
        if env:
            try:
                threads = int(env)
            except ValueError:
                raise ConfigValidationError("CP_DYNAMICS_THREADS", f"not an integer: {env!r}")
    if threads is not None:
        raw["threads"] = threads
    if command == "energy":
        raw["outputs"] = ["energy"]
    elif command == "force":
        raw["outputs"] = ["force"]
    return raw


def _presets(fmt: Optional[str]) -> int:
    if fmt == "json":
        doc = {k: {**v, "x0_range": list(v["x0_range"])} for k, v in PRESETS.items()}
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
        return EXIT_OK
    for name, p in PRESETS.items():
        lo, hi = p["x0_range"]
        print(f"{name}: x0={p['x0']!r} x0p={p['x0p']!r} rho={p['rho']!r} range=[{lo!r}, {hi!r}]")
        print(f"    {p['description']}")
    return EXIT_OK


def _cavity_check(cfg: RunConfig, s: float) -> int:
    if cfg.scenario is not ScenarioKind.BARE:
        print("error: the cavity oracle covers the bare scenario only", file=sys.stderr)
        return EXIT_USAGE
    p = cfg.params
    eps0 = energy_unit(p.mu, p.d)
    tol = cfg.oracle.tol if cfg.oracle else 0.02
    rep = cavity.convergence_study(cavity.reference_ladder(p.d), p, s * p.d, threads=cfg.threads)
    zero = cavity.bare_expectation_sum(cavity.reference_ladder(p.d)[-1], p, 0.0, threads=cfg.threads)
    passed = rep.relative_deviation <= tol and zero == 0.0
    if cfg.output_format == "json":
        doc = {
            "t_over_d": s,
            "rows": [
                {
                    "L_over_d": r.L / p.d,
                    "n_max": r.n_max,
                    "epsilon_over_d": r.epsilon / p.d,
                    "value_over_eps0": r.value / eps0,
                    "deviation_over_eps0": r.deviation / eps0,
                    "regulated_deviation_over_eps0": r.regulated_deviation / eps0,
                }
                for r in rep.rows
            ],
            "trend": rep.trend,
            "extrapolated_over_eps0": rep.extrapolated / eps0,
            "continuum_over_eps0": rep.continuum / eps0,
            "max_rel_dev": rep.relative_deviation,
            "t0_sum_over_eps0": zero / eps0,
            "tol": tol,
            "status": "pass" if passed else "fail",
        }
        text = json.dumps(doc, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(
            [
                "L_over_d",
                "n_max",
                "epsilon_over_d",
                "value_over_eps0",
                "deviation_over_eps0",
                "regulated_deviation_over_eps0",
            ]
        )
        for r in rep.rows:
            w.writerow(
                [
                    repr(r.L / p.d),
                    r.n_max,
                    repr(r.epsilon / p.d),
                    repr(r.value / eps0),
                    repr(r.deviation / eps0),
                    repr(r.regulated_deviation / eps0),
                ]
            )
        text = buf.getvalue()
    try:
        _write(cfg.out, text)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    info = sys.stderr if cfg.out in (None, "-") else sys.stdout
    print(
        f"oracle=cavity trend={rep.trend} extrapolated_over_eps0={rep.extrapolated / eps0:.6g} "
        f"continuum_over_eps0={rep.continuum / eps0:.6g} max_rel_dev={rep.relative_deviation:.3e} "
        f"t0_sum={zero!r} tol={tol:g} status={'pass' if passed else 'fail'}",
        file=info,
    )
    return EXIT_OK if passed else EXIT_ORACLE


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.command is None:
            raise _UsageError("a subcommand is required")
        if ns.command == "presets":
            return _presets(ns.fmt)
        raw: dict = {}
        if ns.config:
            try:
                with open(ns.config, encoding="utf-8") as fh:
                    source = fh.read()
            except OSError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_IO
            raw = load_raw_config(source)
        raw = _merge_flags(raw, ns, ns.command)
        if ns.command == "cavity-check":
            raw.pop("time_grid", None)
            if ns.tol is not None:
                raw["oracle"] = {"kind": "cavity", "tol": ns.tol}
            cfg = build_config(raw)
            return _cavity_check(cfg, ns.t_single)
        cfg = build_config(raw)
    except (_UsageError, ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
