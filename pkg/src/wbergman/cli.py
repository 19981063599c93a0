"""Command-line driver: ``wbergman --config run.json --out results/``.

The config is one JSON document whose ``command`` field selects the run:
``norm``, ``check-condition``, ``find-k``, ``check-monotone``,
``dilate-converge``, ``taylor-error`` or ``density``. Every run writes
``report.json``; tabular runs also write ``rows.csv`` and, with
``"plot": true``, ``plot.svg``. Exit status is 0 on success, 2 for invalid
input and 3 for numerical or weight-domain failures.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__, kernels
from .errors import InvalidArgument, InvalidSpec, WBergmanError, WeightSyntaxError
from .integrate import QuadratureSpec
from .series import PowerSeries
from .spaces import NORM_KINDS, NormSpec, norm, taylor_error
from .verify import (
    Grid, check_condition, check_monotone, density_csv, density_experiment,
    dilation_convergence, find_min_k,
)
from .weights import weight_from_name

log = logging.getLogger("wbergman")

COMMANDS = ("norm", "check-condition", "find-k", "check-monotone",
            "dilate-converge", "taylor-error", "density")
_NEEDS = {
    "norm": ("series", "norm"),
    "check-condition": ("k",),
    "find-k": (),
    "check-monotone": ("k",),
    "dilate-converge": ("series", "norm", "radii"),
    "taylor-error": ("series", "norm", "degrees"),
    "density": ("series", "norm", "r", "degrees"),
}


class ConfigError(InvalidArgument):
    pass


@dataclass
class RunConfig:
    command: str
    dimension: int
    weight: object
    seed: int = 0
    series: PowerSeries = None
    norm_spec: NormSpec = None
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    grid: Grid = field(default_factory=Grid)
    params: dict = field(default_factory=dict)
    plot: bool = False
    raw: dict = field(default_factory=dict)


def _weight_from_config(obj, n):
    if obj is None:
        return weight_from_name("unit", n)
    if isinstance(obj, str):
        return weight_from_name(obj, n)
    if not isinstance(obj, dict) or "name" not in obj:
        raise ConfigError('weight must be a name string or an object with "name"')
    params = {k: v for k, v in obj.items() if k != "name"}
    return weight_from_name(obj["name"], n, **params)


def _series_from_config(obj, base_dir):
    if isinstance(obj, str):
        path = Path(obj)
        if not path.is_absolute():
            path = base_dir / path
        try:
            obj = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read series file {path}: {exc}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"series file {path} is not valid JSON: {exc}")
    return PowerSeries.from_json(obj)


def load_config(raw, base_dir=Path(".")):
    """Validate a config mapping into a ``RunConfig``; raises ``ConfigError``-family errors."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    command = raw.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"command must be one of {COMMANDS}, got {command!r}")
    missing = [k for k in ("dimension",) + _NEEDS[command] if k not in raw]
    if missing:
        raise ConfigError(f"{command}: missing required field(s) {missing}")
    n = raw["dimension"]
    if not isinstance(n, int) or n < 1:
        raise ConfigError(f"dimension must be a positive integer, got {n!r}")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed must be a non-negative integer")
    quad = QuadratureSpec(**{**raw.get("quadrature", {}), "seed": seed})
    grid = Grid(**{**raw.get("grid", {}), "seed": seed})
    weight = _weight_from_config(raw.get("weight"), n)
    cfg = RunConfig(command=command, dimension=n, weight=weight, seed=seed,
                    quadrature=quad, grid=grid, plot=bool(raw.get("plot", False)), raw=raw)
    if "series" in raw:
        cfg.series = _series_from_config(raw["series"], base_dir)
        if cfg.series.dimension != n:
            raise ConfigError(f"series dimension {cfg.series.dimension} != {n}")
    if "norm" in raw:
        spec = dict(raw["norm"])
        kind = spec.pop("kind", None)
        if kind not in NORM_KINDS:
            raise ConfigError(f"norm kind must be one of {NORM_KINDS}, got {kind!r}")
        allowed = {"p", "alpha", "N", "rho_max", "seminorm", "cross_terms", "error_levels"}
        extra = set(spec) - allowed
        if extra:
            raise ConfigError(f"unknown norm field(s) {sorted(extra)}")
        cfg.norm_spec = NormSpec(n, kind, weight=weight, quadrature=quad, **spec)
    for key in ("k", "k_max", "r0", "bound", "r_min", "r", "radii", "degrees", "threshold"):
        if key in raw:
            cfg.params[key] = raw[key]
    for key in ("radii", "degrees"):
        if key in cfg.params and not isinstance(cfg.params[key], list):
            raise ConfigError(f"{key} must be a list")
    return cfg


def _rows_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def execute(cfg, workers=1):
    """Run a validated config; returns ``(result_json, csv_text or None, plot_rows or None)``."""
    if cfg.norm_spec is not None:
        cfg.norm_spec = cfg.norm_spec.with_(workers=workers)
    p = cfg.params
    if cfg.command == "norm":
        return norm(cfg.series, cfg.norm_spec).to_json(), None, None
    if cfg.command == "check-condition":
        rep = check_condition(cfg.weight, p["k"], p.get("r0", 0.5), cfg.grid,
                              p.get("bound", 1e6))
        return rep.to_json(), None, None
    if cfg.command == "find-k":
        k_min, reports = find_min_k(cfg.weight, p.get("k_max", 8), p.get("r0", 0.5),
                                    cfg.grid, p.get("bound", 1e6))
        rows = [(r.k_tested, r.C_estimate, r.passed) for r in reports]
        return ({"k_min": k_min, "reports": [r.to_json() for r in reports]},
                _rows_csv(["k", "C_estimate", "passed"], rows), None)
    if cfg.command == "check-monotone":
        rep = check_monotone(cfg.weight, p["k"], cfg.grid, p.get("r_min", 0.0))
        return rep.to_json(), None, None
    if cfg.command == "dilate-converge":
        rep = dilation_convergence(cfg.series, cfg.norm_spec, p["radii"],
                                   threshold=p.get("threshold", 1e-2))
        plot_rows = [(r, d) for r, _, d in rep.rows]
        return rep.to_json(), rep.to_csv(), ("r", plot_rows)
    if cfg.command == "taylor-error":
        rows = [(int(k), taylor_error(cfg.series, int(k), cfg.norm_spec)) for k in p["degrees"]]
        return ({"rows": [{"k": k, "taylor_error": e} for k, e in rows]},
                _rows_csv(["k", "taylor_error"], rows), ("degree", rows))
    if cfg.command == "density":
        rows = density_experiment(cfg.series, cfg.norm_spec, p["r"], p["degrees"])
        return ({"r": p["r"], "rows": [{"degree": d, "error": e} for d, e in rows]},
                density_csv(rows), ("degree", rows))
    raise ConfigError(f"unknown command {cfg.command!r}")


def emit_plot(rows, path, xlabel="r"):
    """Static log-scale error plot of ``(x, error)`` rows written as SVG."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "wbergman"
    fig, ax = plt.subplots(figsize=(5, 3.5))
    xs = [x for x, _ in rows]
    ys = [max(y, 1e-300) for _, y in rows]
    if rows:
        ax.plot(xs, ys, marker="o")
    ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("error")
    fig.tight_layout()
    _atomic_write(Path(path), lambda fh: fig.savefig(fh, format="svg", metadata={"Date": None}),
                  binary=True)
    plt.close(fig)
    return len(rows)


def _atomic_write(path, writer, binary=False):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb" if binary else "w", **({} if binary else
                                                        {"encoding": "utf-8", "newline": ""})) as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(raw, out_dir, workers=1, reproducible=False, base_dir=Path(".")):
    """Validate, execute and write artifacts. Returns the process exit status."""
    started = time.time()
    try:
        cfg = load_config(raw, base_dir)
    except (InvalidArgument, InvalidSpec, WeightSyntaxError, TypeError, KeyError) as exc:
        print(f"wbergman: invalid config: {exc}", file=sys.stderr)
        return 2
    try:
        result, csv_text, plot_rows = execute(cfg, workers)
    except (InvalidArgument, InvalidSpec) as exc:
        print(f"wbergman: invalid input: {exc}", file=sys.stderr)
        return 2
    except (WBergmanError, ArithmeticError, FloatingPointError) as exc:
        print(f"wbergman: numerical error: {exc}", file=sys.stderr)
        return 3
    report = {"command": cfg.command, "config": raw, "result": result,
              "version": __version__, "backend": kernels.BACKEND}
    if not reproducible:
        report["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(started))
        report["elapsed_s"] = time.time() - started
    out_dir = Path(out_dir)
    text = json.dumps(report, indent=2, sort_keys=True, allow_nan=True) + "\n"
    _atomic_write(out_dir / "report.json", lambda fh: fh.write(text))
    if csv_text is not None:
        _atomic_write(out_dir / "rows.csv", lambda fh: fh.write(csv_text))
    if cfg.plot and plot_rows is not None:
        emit_plot(plot_rows[1], out_dir / "plot.svg", plot_rows[0])
    print(f"wbergman: {cfg.command} ok -> {out_dir / 'report.json'}", file=sys.stderr)
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(prog="wbergman", description=__doc__.splitlines()[0])
    parser.add_argument("--config", required=True, help="JSON config path, or - for stdin")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--workers", type=int, default=1, help="cap on worker threads")
    parser.add_argument("--reproducible", action="store_true",
                        help="omit timestamps so identical runs give identical bytes")
    args = parser.parse_args(argv)
    if args.workers < 1:
        parser.error("--workers must be >= 1")
    try:
        if args.config == "-":
            raw, base = json.load(sys.stdin), Path(".")
        else:
            path = Path(args.config)
            raw, base = json.loads(path.read_text(encoding="utf-8")), path.parent
    except (OSError, json.JSONDecodeError) as exc:
        print(f"wbergman: cannot load config: {exc}", file=sys.stderr)
        return 2
    return run(raw, args.out, args.workers, args.reproducible, base)


if __name__ == "__main__":
    sys.exit(main())
