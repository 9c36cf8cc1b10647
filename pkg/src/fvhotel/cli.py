"""Command-line interface.

Each subcommand prints comma-delimited results to stdout and writes its
files (CSV, PPM/PGM, JSON and PNG figures) into ``--out``.

Exit codes: 0 success, 1 configuration or I/O error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .config import FIELDS, RunConfig, parse_config, read_config_file
from .emit import EmitError, HotelReport, write_field_csv, write_image, write_report
from .field import SeriesNotConverged, fractional_field_grid, interferogram
from .fringes import fork_orientations, fringe_dislocations
from .grid import ConfigError, ComplexField
from .oracle import oracle_propagate
from .render import render_intensity, render_phase
from .vortex import (
    NumericalFailure,
    analyze_field,
    default_amplitude_floor,
    detect_vortices,
    sweep_track,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2

_HELP = {
    "mu": "topological charge of the plate",
    "lambda": "wavelength (m)",
    "z": "propagation distance (m)",
    "half-width": "half-width of the square window (m)",
    "nx": "pixels along x",
    "ny": "pixels along y",
    "n-max": "mode-sum truncation (default: adaptive)",
    "tail-tol": "relative change accepted by the adaptive truncation",
    "amplitude": "reference wave amplitude",
    "tilt": "reference wave tilt (rad/m, default: 10-pixel fringes)",
    "width": "reference wave Gaussian width (m)",
    "shift": "reference wave envelope shift (m)",
    "aperture-radius": "oracle aperture radius (m)",
    "n-quad": "oracle quadrature points per axis",
    "out": "output directory",
}


class _Parser(argparse.ArgumentParser):
    """Argument errors become :class:`ConfigError` (exit code 1)."""

    def error(self, message):
        raise ConfigError("arguments", message)


def _add_common(p: argparse.ArgumentParser, sweep: bool = False) -> None:
    p.add_argument("--config", metavar="FILE", help="flat 'key = value' file; flags override it")
    for key, help_text in _HELP.items():
        if key == "mu" and sweep:
            continue
        p.add_argument(f"--{key}", dest=key.replace("-", "_"), metavar="V", help=help_text)
    if sweep:
        for key in ("from", "to", "step"):
            p.add_argument(f"--{key}", dest=key, metavar="MU", help=f"sweep {key}")
    for key in ("csv", "images", "figures"):
        p.add_argument(f"--no-{key}", dest=key, action="store_const", const="false",
                       help=f"skip {key} output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fvhotel", description="Fractional vortex beams and their vortex bookkeeping.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    for name, help_text in (
        ("simulate", "propagate the plate and render the phase"),
        ("interfere", "interfere with the reference wave and analyse forks"),
        ("detect", "list phase singularities"),
        ("hotel", "pair vortices and write the hotel report"),
        ("oracle-check", "compare the mode series against direct quadrature"),
    ):
        _add_common(sub.add_parser(name, help=help_text))
    _add_common(sub.add_parser("sweep", help="track vortices over a range of charges"), sweep=True)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    file_values = read_config_file(args.config) if args.config else {}
    flags = {}
    for key in FIELDS:
        dest = key.replace("-", "_")
        if getattr(args, dest, None) is not None:
            flags[key] = getattr(args, dest)
    return parse_config(file_values, flags)


def _path(cfg: RunConfig, name: str, ext: str) -> Path:
    return Path(cfg.output_dir) / f"{name}_mu{cfg.mu:g}{ext}"


def _field(cfg: RunConfig, mu: Optional[float] = None) -> ComplexField:
    return fractional_field_grid(cfg.mu if mu is None else mu, cfg.grid, cfg.optics, cfg.trunc)


def _print_rows(header: str, rows) -> None:
    print(header)
    for row in rows:
        print(",".join(_fmt(v) for v in row))


def _fmt(v) -> str:
    if isinstance(v, float):
        return "%.9g" % v
    return str(v)


# ---------------------------------------------------------------- commands


def cmd_simulate(cfg: RunConfig) -> int:
    fld = _field(cfg)
    rgb = render_phase(fld)
    if cfg.emit.csv:
        write_field_csv(_path(cfg, "field", ".csv"), fld)
    if cfg.emit.images:
        write_image(_path(cfg, "phase", ".ppm"), rgb)
    if cfg.emit.figures:
        from .figures import phase_figure

        phase_figure(_path(cfg, "phase", ".png"), rgb, cfg.grid,
                     detect_vortices(fld), title=f"mu = {cfg.mu:g}")
    amp = np.abs(fld.values)
    _print_rows("mu,n_max,tail_change,max_amplitude,min_amplitude",
                [(cfg.mu, fld.meta.get("n_max", 0), float(fld.meta.get("tail_change", 0.0)),
                  float(amp.max()), float(amp.min()))])
    return EXIT_OK


def cmd_interfere(cfg: RunConfig) -> int:
    fld = _field(cfg)
    ref = cfg.reference.resolved(cfg.grid)
    inten = interferogram(fld, ref)
    img = render_intensity(inten)
    if cfg.emit.images:
        write_image(_path(cfg, "interferogram", ".pgm"), img)
    if cfg.emit.figures:
        from .figures import intensity_figure

        intensity_figure(_path(cfg, "interferogram", ".png"), img, cfg.grid,
                         title=f"mu = {cfg.mu:g}")
    disl = fringe_dislocations(inten, ref.tilt)
    forks = fork_orientations(inten, ref.tilt, detect_vortices(fld))
    _print_rows("kind,x,y,charge,orientation",
                [("fork", f.x, f.y, f.charge, f.orientation) for f in forks]
                + [("dislocation", d.x, d.y, d.charge, "") for d in disl])
    return EXIT_OK


def cmd_detect(cfg: RunConfig) -> int:
    fld = _field(cfg)
    vortices = detect_vortices(fld)
    rows = [(v.x, v.y, v.charge) for v in vortices]
    if cfg.emit.csv:
        path = _path(cfg, "vortices", ".csv")
        text = "x,y,charge\n" + "".join("%.17g,%.17g,%d\n" % r for r in rows)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="ascii")
        except OSError as exc:
            raise EmitError(f"cannot write {path}: {exc.strerror or exc}") from exc
    _print_rows("x,y,charge", rows)
    return EXIT_OK


def cmd_hotel(cfg: RunConfig) -> int:
    fld = _field(cfg)
    state = analyze_field(fld, cfg.mu)
    report = HotelReport.from_state(state, cfg.digest())
    write_report(_path(cfg, "hotel", ".json"), report)
    if cfg.emit.figures:
        from .figures import hotel_title, phase_figure

        phase_figure(_path(cfg, "hotel", ".png"), render_phase(fld), cfg.grid,
                     detect_vortices(fld), title=hotel_title(state))
    _print_rows("mu,regime,correspondence,central_charge,pairs,vacant_rooms,boundary_rooms",
                [(state.mu, state.regime.value, state.correspondence.value, state.central_charge,
                  len(state.full_pairs), len(state.vacant_rooms), state.boundary_rooms)])
    return EXIT_OK


def sweep_document(cfg: RunConfig, result) -> dict:
    return {
        "config_hash": cfg.digest(),
        "tool_version": __version__,
        "states": [
            {
                "mu": s.mu,
                "regime": s.regime.value,
                "correspondence": s.correspondence.value,
                "central_charge": s.central_charge,
                "pairs": len(s.full_pairs),
                "vacant_rooms": len(s.vacant_rooms),
                "boundary_rooms": s.boundary_rooms,
            }
            for s in result.states
        ],
        "trajectories": [
            {"charge": t.charge, "points": [list(p) for p in t.points]} for t in result.trajectories
        ],
    }


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.sweep is None:
        raise ConfigError("from", "sweep needs --from, --to and --step")
    result = sweep_track(cfg.sweep.values(), cfg.grid, cfg.optics, cfg.trunc)
    base = Path(cfg.output_dir) / f"sweep_mu{cfg.sweep.start:g}-{cfg.sweep.stop:g}"
    out = Path(f"{base}.json")
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(json.dumps(sweep_document(cfg, result), indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise EmitError(f"cannot write {out}: {exc.strerror or exc}") from exc
    if cfg.emit.figures:
        from .figures import sweep_figure

        sweep_figure(Path(f"{base}.png"), result)
    _print_rows("mu,regime,correspondence,pairs,vacant_rooms",
                [(s.mu, s.regime.value, s.correspondence.value, len(s.full_pairs), len(s.vacant_rooms))
                 for s in result.states])
    return EXIT_OK


def oracle_residual(series: ComplexField, oracle: ComplexField, fraction: float = 0.5) -> float:
    """Relative L2 difference over the central ``fraction`` of the window (per axis)."""
    xx, yy = series.grid.mesh()
    lim = fraction * series.grid.half_width * (1 + 1e-12)
    core = (np.abs(xx) <= lim) & (np.abs(yy) <= lim)
    diff = series.values[core] - oracle.values[core]
    return float(np.linalg.norm(diff) / np.linalg.norm(oracle.values[core]))


def cmd_oracle_check(cfg: RunConfig) -> int:
    fld = _field(cfg)
    ref = oracle_propagate(cfg.mu, cfg.grid, cfg.optics, cfg.aperture_radius, cfg.n_quad)
    res = oracle_residual(fld, ref)
    floor = default_amplitude_floor(fld)
    _print_rows("mu,relative_l2,n_quad,aperture_radius,amplitude_floor",
                [(cfg.mu, res, cfg.n_quad, cfg.aperture_radius, floor)])
    if not math.isfinite(res):
        return EXIT_NUMERICAL
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "interfere": cmd_interfere,
    "detect": cmd_detect,
    "hotel": cmd_hotel,
    "sweep": cmd_sweep,
    "oracle-check": cmd_oracle_check,
}


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = config_from_args(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"fvhotel: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EmitError as exc:
        print(f"fvhotel: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, SeriesNotConverged) as exc:
        print(f"fvhotel: numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main() -> None:
    sys.exit(run_cli())
