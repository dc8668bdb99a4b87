"""Command line entry point: price | smile | density | mc | check.

Every run writes CSV (17 significant digits, header always present) plus a
JSON manifest holding the resolved configuration.  Feeding the manifest back
through --config reproduces the CSV byte for byte.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import warnings
from dataclasses import asdict, dataclass, field, fields
from typing import List, Optional

import numpy as np

from . import __version__
from .blackscholes import ImpliedVolError, implied_vol
from .model import (
    DEFAULT_Y0_SHIFT,
    ModelParams,
    SeriesValidityWarning,
    check_series_bound,
    eta_norm,
    validity_threshold,
)
from .montecarlo import McConfig, simulate_calls
from .quadrature import QuadratureError
from .smile import smile_curve
from .spectral import ImaginaryResidualError, density, price
from .transforms import ContourSpec, PayoffSpec, bad_offsets, resolve_offset

log = logging.getLogger("lvsmile")

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
COMMANDS = ("price", "smile", "density", "mc", "check")
DEFAULT_ORDER = {"price": 10, "smile": 5, "density": 6, "mc": 10, "check": 10}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    a: float = 0.25
    eps: Optional[float] = None
    sqrt_eps: Optional[float] = None
    beta: float = -0.75
    y: float = 0.0
    t: float = 1.0
    order: Optional[int] = None
    k: Optional[List[float]] = None
    lmmr_min: Optional[float] = None
    lmmr_max: Optional[float] = None
    lmmr_count: Optional[int] = None
    contour_offset: Optional[float] = None
    rel_tol: float = 1e-10
    half_width: Optional[float] = None
    paths: int = 200_000
    dt: float = 1e-3
    seed: int = 12345
    antithetic: bool = False
    workers: int = 1
    reference: bool = False
    y0: Optional[float] = None
    y_min: float = -2.5
    y_max: float = 2.5
    y_step: float = 0.01
    bound_y0: Optional[float] = None

    def resolved_eps(self):
        if self.eps is not None and self.sqrt_eps is not None:
            raise ConfigError("give exactly one of eps / sqrt_eps")
        if self.eps is not None:
            return self.eps
        return (0.15 if self.sqrt_eps is None else self.sqrt_eps) ** 2

    def params(self):
        try:
            return ModelParams(a=self.a, eps=self.resolved_eps(), beta=self.beta, y=self.y)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def strikes(self):
        if self.k:
            return [float(v) for v in self.k]
        if None not in (self.lmmr_min, self.lmmr_max, self.lmmr_count):
            if self.lmmr_count < 1:
                raise ConfigError("lmmr_count must be positive")
            lm = np.linspace(self.lmmr_min, self.lmmr_max, int(self.lmmr_count))
            return [self.y + self.t * float(v) for v in lm]
        raise ConfigError("strike specification missing: use --k or --lmmr-min/--lmmr-max/--lmmr-count")

    def contour(self, kind):
        offset = self.contour_offset
        if offset is None:
            offset = -1.5 if kind == "call" else 0.0
        try:
            spec = ContourSpec(offset=offset, half_width=self.half_width, rel_tol=self.rel_tol)
            spec.validate_for(PayoffSpec.call(0.0) if kind == "call" else PayoffSpec.dirac(0.0))
            return spec
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_BOOL_KEYS = {"antithetic", "reference"}
_INT_KEYS = {"order", "lmmr_count", "paths", "seed", "workers"}


def _coerce(key, value):
    if value is None:
        return None
    if key == "k":
        if isinstance(value, (list, tuple)):
            return [float(v) for v in value]
        return [float(v) for v in str(value).replace(",", " ").split()]
    if key in _BOOL_KEYS:
        if isinstance(value, bool):
            return value
        return str(value).strip().lower() in ("1", "true", "yes", "on")
    if key in _INT_KEYS:
        return int(value)
    return float(value)


def load_config_file(path):
    """Flat key=value text, or a JSON manifest written by a previous run."""
    try:
        text = open(path).read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        data = data.get("config", data)
    else:
        data = {}
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{n}: expected key=value")
            key, val = line.split("=", 1)
            data[key.strip()] = val.strip()
    out = {}
    for key, val in data.items():
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            out[key] = _coerce(key, val)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {val!r}") from exc
    return out


def build_parser():
    parser = argparse.ArgumentParser(prog="lvsmile", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--a", type=float)
    g.add_argument("--eps", type=float)
    g.add_argument("--sqrt-eps", type=float)
    g.add_argument("--beta", type=float)
    g.add_argument("--y", type=float, help="log spot")
    g.add_argument("--t", type=float, help="maturity in years")
    g.add_argument("--order", type=int)
    s = common.add_argument_group("strikes")
    s.add_argument("--k", type=float, nargs="+", help="log strikes")
    s.add_argument("--lmmr-min", type=float)
    s.add_argument("--lmmr-max", type=float)
    s.add_argument("--lmmr-count", type=int)
    q = common.add_argument_group("quadrature")
    q.add_argument("--contour-offset", type=float)
    q.add_argument("--rel-tol", type=float)
    q.add_argument("--half-width", type=float)
    o = common.add_argument_group("output")
    o.add_argument("--out", help="CSV path (default stdout)")
    o.add_argument("--manifest", help="manifest path (default OUT.manifest.json, or stderr)")
    o.add_argument("--config", help="key=value file or a previous manifest")
    o.add_argument("-v", "--verbose", action="store_true")

    sub.add_parser("price", parents=[common], help="series prices per order")
    sp = sub.add_parser("smile", parents=[common], help="implied-vol expansion")
    sp.add_argument("--reference", action="store_true", default=None,
                    help="also invert the N=10 price")
    dp = sub.add_parser("density", parents=[common], help="transition densities")
    dp.add_argument("--y0", type=float, help="start log price (default --y)")
    dp.add_argument("--y-min", type=float)
    dp.add_argument("--y-max", type=float)
    dp.add_argument("--y-step", type=float)
    mp = sub.add_parser("mc", parents=[common], help="Monte Carlo vs series")
    mp.add_argument("--paths", type=int)
    mp.add_argument("--dt", type=float)
    mp.add_argument("--seed", type=int)
    mp.add_argument("--antithetic", action="store_true", default=None)
    mp.add_argument("--workers", type=int)
    cp = sub.add_parser("check", parents=[common], help="validity report")
    cp.add_argument("--bound-y0", type=float, help=f"norm domain start (default y - {DEFAULT_Y0_SHIFT:g})")
    return parser


def resolve_config(args):
    """defaults < config file < flags."""
    values = {}
    if args.config:
        values.update(load_config_file(args.config))
    flags = {k: v for k, v in vars(args).items() if k in _FIELD_TYPES and v is not None}
    if "eps" in flags or "sqrt_eps" in flags:
        values.pop("eps", None)
        values.pop("sqrt_eps", None)
    values.update(flags)
    cfg = RunConfig(**values)
    if cfg.order is None:
        cfg.order = DEFAULT_ORDER[args.command]
    if cfg.order < 0:
        raise ConfigError("order must be non-negative")
    if not cfg.t > 0:
        raise ConfigError("t must be positive")
    cfg.eps = cfg.resolved_eps()
    cfg.sqrt_eps = None
    return cfg


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def _rows_to_csv(header, rows):
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def cmd_price(cfg):
    p = cfg.params()
    rows = []
    for k in cfg.strikes():
        series = price(p, PayoffSpec.call(k), cfg.t, cfg.order, cfg.contour("call"))
        cum = 0.0
        for n, term in enumerate(series.terms):
            cum = series.total if n == cfg.order else cum + term
            rows.append((k, (k - p.y) / cfg.t, n, term, cum))
    return _rows_to_csv(["k", "lmmr", "order", "term", "cumulative_price"], rows)


def cmd_smile(cfg):
    p = cfg.params()
    curve = smile_curve(p, cfg.t, cfg.strikes(), cfg.order, cfg.contour("call"),
                        with_reference=cfg.reference)
    rows = []
    for pt in curve.points:
        if pt.error:
            log.warning("k=%s: %s", fmt(pt.k), pt.error)
            rows.extend((pt.k, pt.lmmr, n, math.nan, math.nan) for n in range(cfg.order + 1))
            continue
        for n, s in enumerate(pt.sigmas):
            rows.append((pt.k, pt.lmmr, n, s, pt.reference))
    if all(pt.error for pt in curve.points):
        raise QuadratureError("every smile point failed")
    return _rows_to_csv(["k", "lmmr", "order", "sigma_n", "sigma_reference"], rows)


def density_grid(cfg):
    if not cfg.y_step > 0 or cfg.y_max < cfg.y_min:
        raise ConfigError("bad y grid")
    n = int(math.floor((cfg.y_max - cfg.y_min) / cfg.y_step + 1e-9)) + 1
    return np.round(cfg.y_min + cfg.y_step * np.arange(n), 12)


def cmd_density(cfg):
    p = cfg.params()
    y0 = p.y if cfg.y0 is None else cfg.y0
    grid = density_grid(cfg)
    dens = density(p, cfg.t, y0, cfg.order, grid, cfg.contour("dirac"))
    rows = [(y, n, dens.p_orders[n, i])
            for i, y in enumerate(grid) for n in range(cfg.order + 1)]
    return _rows_to_csv(["y", "order", "p_n"], rows)


def _safe_iv(px, t, y, k):
    try:
        return implied_vol(px, t, y, k)
    except ImpliedVolError:
        return math.nan


def cmd_mc(cfg):
    p = cfg.params()
    ks = cfg.strikes()
    try:
        mc_cfg = McConfig(n_paths=cfg.paths, dt=cfg.dt, seed=cfg.seed,
                          antithetic=cfg.antithetic, workers=cfg.workers)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    ests = simulate_calls(p, cfg.t, ks, mc_cfg)
    rows = []
    for k, est in zip(ks, ests):
        spec = price(p, PayoffSpec.call(k), cfg.t, cfg.order, cfg.contour("call")).total
        rows.append((k, (k - p.y) / cfg.t, est.price, est.std_error, spec,
                     _safe_iv(est.price, cfg.t, p.y, k), _safe_iv(spec, cfg.t, p.y, k)))
    return _rows_to_csv(
        ["k", "lmmr", "mc_price", "std_err", "spectral_price", "implied_mc", "implied_spectral"],
        rows,
    )


def cmd_check(cfg):
    p = cfg.params()
    y0 = p.y - DEFAULT_Y0_SHIFT if cfg.bound_y0 is None else cfg.bound_y0
    lines = [f"model: a={fmt(p.a)} eps={fmt(p.eps)} beta={fmt(p.beta)} y={fmt(p.y)}"]
    if p.eps == 0:
        lines.append("series bound: bound trivially satisfied (eps = 0)")
    elif p.beta == 0:
        lines.append("series bound: cannot be certified for beta = 0")
    else:
        bound = p.a**2 / eta_norm(p.beta, y0)
        status = "satisfied" if check_series_bound(p, y0) else "violated"
        lines.append(f"series bound: {status} (eps={fmt(p.eps)} vs a^2/||e_beta||={fmt(bound)}, y0={fmt(y0)})")
    ystar = validity_threshold(p)
    lines.append(f"validity threshold y*: {fmt(ystar)}")
    inside = p.y >= ystar
    lines.append(f"pricing point y={fmt(p.y)}: {'inside' if inside else 'OUTSIDE'} guaranteed-convergence region")
    bad = bad_offsets(cfg.order, p.beta)
    lines.append(f"bad contour offsets (N={cfg.order}): " + " ".join(fmt(b) for b in bad))
    req = -1.5 if cfg.contour_offset is None else cfg.contour_offset
    used = resolve_offset(req, cfg.order, p.beta, "call")
    lines.append(f"call contour offset: requested {fmt(req)}, used {fmt(used)}")
    return "\n".join(lines) + "\n"


HANDLERS = {"price": cmd_price, "smile": cmd_smile, "density": cmd_density,
            "mc": cmd_mc, "check": cmd_check}


def manifest(command, cfg):
    return {
        "tool": "lvsmile",
        "version": __version__,
        "command": command,
        "numpy": np.__version__,
        "seed": cfg.seed,
        "config": asdict(cfg),
    }


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    warnings.simplefilter("always", SeriesValidityWarning)
    try:
        cfg = resolve_config(args)
        text = HANDLERS[args.command](cfg)
    except ConfigError as exc:
        print(f"lvsmile: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, ImaginaryResidualError, ArithmeticError) as exc:
        print(f"lvsmile: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    man = manifest(args.command, cfg)
    man_path = args.manifest or (args.out + ".manifest.json" if args.out else None)
    if man_path:
        with open(man_path, "w") as fh:
            fh.write(json.dumps(man, indent=2, sort_keys=True) + "\n")
    else:
        print("manifest: " + json.dumps(man, sort_keys=True), file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
