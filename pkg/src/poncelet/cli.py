"""Command-line interface: ``poncelet {iterate,rotation,staircase,periodic,conjugacy}``.

Settings are layered: built-in defaults, then ``--preset``, then
``--config`` file, then explicit flags.  Exit status is 0 on success, 1
on configuration errors and 2 on numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import PRESETS, RunConfig, preset
from .errors import ConfigError, PonceletError

log = logging.getLogger("poncelet")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="INI file with [pair], [grid], ... sections")
    p.add_argument("--preset", metavar="NAME", choices=sorted(PRESETS), help="named preset")
    p.add_argument("--out", metavar="DIR", help="output directory")
    p.add_argument("--seed", type=int, metavar="N", help="random seed for sampled checks")
    p.add_argument("--budget", type=int, metavar="N", help="maximum map iterations per estimate")
    p.add_argument("--tol", type=float, metavar="X", help="target error bound")
    p.add_argument("--k", type=float, help="outer level")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="poncelet", description="Poncelet maps between nested ovals.")
    parser.add_argument("--version", action="version", version=f"poncelet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("iterate", help="orbit CSV and SVG")
    _common(p)
    p.add_argument("--count", type=int, help="number of steps")
    p.add_argument("--theta", type=float, dest="seed_theta", help="polar angle of the seed")

    p = sub.add_parser("rotation", help="rotation number as JSON")
    _common(p)

    p = sub.add_parser("staircase", help="rho(k) sweep with plateau detection")
    _common(p)
    p.add_argument("--k-start", type=float, dest="k_start")
    p.add_argument("--k-stop", type=float, dest="k_stop")
    p.add_argument("--k-step", type=float, dest="k_step")

    p = sub.add_parser("periodic", help="periodic orbits from closure conditions")
    _common(p)
    p.add_argument("--period", type=int)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--free-k", dest="free_k", action="store_true", default=None)
    mode.add_argument("--fixed-k", dest="free_k", action="store_false")

    p = sub.add_parser("conjugacy", help="conjugacy verdict as JSON")
    _common(p)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = preset(args.preset) if args.preset else RunConfig()
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc}") from exc
        cfg = RunConfig.from_ini(text, base=cfg)
    overrides = {}
    for name in ("out", "seed", "budget", "tol", "k", "count", "seed_theta", "k_start",
                 "k_stop", "k_step", "period", "free_k"):
        v = getattr(args, name, None)
        if v is not None:
            overrides[name] = v
    return cfg.replace(**overrides) if overrides else cfg


# --- writers ---


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def write_json(path: Path, obj) -> str:
    text = json.dumps(_clean(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    path.write_text(text, encoding="utf-8")
    return text


def _g(v) -> str:
    return f"{v:.17g}"


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "run.ini").write_text(cfg.to_ini(), encoding="utf-8")
    return out


def _build_info() -> str:
    return f"poncelet {__version__}"


def _pair(cfg: RunConfig, k: float | None = None):
    from .core import PonceletPair

    try:
        return PonceletPair(cfg.inner_oval(), cfg.outer_family().with_level(cfg.k if k is None else k))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# --- commands ---


def cmd_iterate(cfg: RunConfig) -> int:
    from .core import iterate
    from .svg import orbit_svg

    pair = _pair(cfg)
    rec = iterate(pair, pair.seed(cfg.seed_theta), cfg.count)
    out = _outdir(cfg)
    with open(out / "orbit.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "x", "y", "theta_lift"])
        for i, ((x, y), th) in enumerate(zip(rec.points, rec.lifted_angles)):
            w.writerow([i, _g(x), _g(y), _g(th)])
    (out / "orbit.svg").write_text(
        orbit_svg(pair, rec.points, title=f"{cfg.count} steps at k = {cfg.k:g}",
                  build_info=_build_info()), encoding="utf-8")
    print(f"wrote {out / 'orbit.csv'} ({len(rec)} points)")
    return EXIT_OK


def cmd_rotation(cfg: RunConfig) -> int:
    from .rotation import rotation_number

    est = rotation_number(_pair(cfg), max_iters=cfg.budget, tol=cfg.tol,
                          max_denominator=cfg.max_denominator)
    out = _outdir(cfg)
    sys.stdout.write(write_json(out / "rotation.json", est.as_dict()))
    return EXIT_OK


def cmd_staircase(cfg: RunConfig) -> int:
    from .staircase import OvalFamily, make_grid, plateau_detect, plateaus_json, rho_sweep
    from .svg import staircase_svg

    try:
        grid = make_grid(cfg.k_start, cfg.k_stop, cfg.k_step)
    except ValueError as exc:
        raise ConfigError(f"empty grid: {exc}") from exc
    family = OvalFamily(cfg.inner_oval(), cfg.outer_family())
    table = rho_sweep(family, grid, max_iters=cfg.budget, tol=cfg.tol,
                      max_denominator=cfg.max_denominator)
    plateaus = plateau_detect(table, cfg.max_denominator, resolution=cfg.resolution)
    out = _outdir(cfg)
    table.write_csv(out / "staircase.csv")
    plateaus_json(plateaus, out / "plateaus.json")
    (out / "staircase.svg").write_text(staircase_svg(table, plateaus, build_info=_build_info()),
                                       encoding="utf-8")
    for p in plateaus:
        j, n = p.rational
        print(f"{j}/{n}: [{p.k_lo:.6f}, {p.k_hi:.6f}] ({p.confidence} grid points)")
    if table.failures:
        log.warning("%d grid points failed", len(table.failures))
    return EXIT_OK


def cmd_periodic(cfg: RunConfig) -> int:
    from .periodic import (
        ClosureProblem,
        find_orbits_fixed_k,
        level_range,
        symmetric_orbits,
        trace_branch,
    )
    from .svg import polygon_svg

    if cfg.period == 2:
        raise ConfigError("period 2 needs rotation number 1/2, which nested ovals never reach")
    problem = ClosureProblem(cfg.period, cfg.inner_oval(), cfg.outer_family(), cfg.k)
    found = find_orbits_fixed_k(problem)
    report = {"period": cfg.period, "k": cfg.k, "solutions": [s.as_dict() for s in found]}
    shown = list(found)
    if cfg.free_k and found:
        lo, hi = level_range(problem, found[0])
        sym = symmetric_orbits(problem, trace_branch(problem, found[0]))
        report["k_range"] = [lo.k, hi.k]
        report["endpoints"] = [lo.as_dict(), hi.as_dict()]
        report["symmetric"] = [s.as_dict() for s in sym]
        shown = [lo] + shown[:1] + [hi] + sym
    out = _outdir(cfg)
    write_json(out / "periodic.json", report)
    for i, sol in enumerate(shown):
        (out / f"periodic_{i}.svg").write_text(
            polygon_svg(_pair(cfg, sol.k), sol, title=f"k = {sol.k:.6f} ({sol.symmetry})",
                        build_info=_build_info()), encoding="utf-8")
    print(f"{len(found)} orbits at k = {cfg.k:g}")
    if "k_range" in report:
        print(f"levels with {cfg.period}-periodic orbits: [{report['k_range'][0]:.6f}, "
              f"{report['k_range'][1]:.6f}]")
    if not found:
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_conjugacy(cfg: RunConfig) -> int:
    from .conjugacy import conjugacy_verdict
    from .rotation import rotation_number

    pair = _pair(cfg)
    rot = rotation_number(pair, max_iters=cfg.budget, tol=cfg.tol,
                          max_denominator=cfg.max_denominator)
    rep = conjugacy_verdict(pair, samples=cfg.samples, seed=cfg.seed, rotation=rot)
    out = _outdir(cfg)
    sys.stdout.write(write_json(out / "conjugacy.json", rep.as_dict()))
    return EXIT_OK


COMMANDS = {
    "iterate": cmd_iterate,
    "rotation": cmd_rotation,
    "staircase": cmd_staircase,
    "periodic": cmd_periodic,
    "conjugacy": cmd_conjugacy,
}


def main(argv=None) -> int:
    logging.basicConfig(format="%(levelname)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        if args.verbose:
            log.setLevel(logging.INFO)
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"poncelet: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PonceletError, ArithmeticError) as exc:
        print(f"poncelet: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
