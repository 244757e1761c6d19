"""Command-line front end: flat-file configuration, experiment orchestration, CSV artifacts.

Subcommands
    run       one closed loop per configured bound kind  -> trajectory.csv
    sweep     MSE at eval_step over the SNR list         -> mse_vs_snr.csv
    bounds    WWB surface on the uniform prior           -> bound_surface.csv
    policies  per-step selection timeline per bound kind -> selections.csv

Every invocation writes a manifest next to its CSVs. Re-running with the same
configuration and seed reproduces the CSVs byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .annealing import grid_points
from .bounds import UniformPosterior, wwb_values
from .controller import BoundKind, H_DOMAIN, S_DOMAIN
from .geometry import effective_positions
from .simulator import (ExperimentConfig, derive_seed, run_closed_loop, snr_sweep)


class ConfigError(ValueError):
    pass


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_snr_list(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(","))


def _parse_bounds(text: str) -> tuple[BoundKind, ...]:
    kinds = []
    for part in text.split(","):
        part = part.strip().lower()
        try:
            kinds.append(BoundKind(part))
        except ValueError:
            valid = ", ".join(k.value for k in BoundKind)
            raise ValueError(f"unknown bound {part!r} (valid: {valid})") from None
    return tuple(kinds)


def _parse_choice(*choices: str):
    def parse(text: str) -> str:
        value = text.strip().lower()
        if value not in choices:
            raise ValueError(f"expected one of {choices}, got {text!r}")
        return value
    return parse


_KEY_PARSERS = {
    "n_rx": int, "n_tx": int, "i_rx": int, "i_tx": int,
    "fix_first": _parse_bool,
    "spacing_factor": float, "wavelength": float, "inter_pulse": float,
    "mode": _parse_choice("simo", "mimo"),
    "snapshots": int,
    "signal_value": complex,
    "snr_db": _parse_snr_list,
    "f_d": float,
    "particles": int,
    "resample_mode": _parse_choice("always", "ess"),
    "posterior_repr": _parse_choice("gauss", "grid"),
    "grid_bins": int,
    "bound": _parse_bounds,
    "sa_temps": int, "sa_moves": int,
    "steps": int,
    "theta_true": float,
    "n_real": int, "n_traj": int, "eval_step": int,
    "seed": int,
}


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse a flat ``key = value`` file; unknown keys are rejected, missing ones defaulted."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _KEY_PARSERS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _KEY_PARSERS[key](value)
        except ValueError as err:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {err}") from None
    try:
        return ExperimentConfig(**values)
    except ValueError as err:
        raise ConfigError(f"{path}: {err}") from None


def _fmt(value) -> str:
    """Locale-independent cell formatting; floats carry 17 significant digits."""
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _idx(indices: tuple[int, ...]) -> str:
    return ";".join(str(i) for i in indices)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _config_echo(cfg: ExperimentConfig) -> dict:
    echo = {}
    for key in _KEY_PARSERS:
        value = getattr(cfg, key)
        if isinstance(value, tuple):
            value = ",".join(v.value if isinstance(v, BoundKind) else _fmt(v) for v in value)
        elif isinstance(value, complex):
            value = str(value)
        echo[key] = value
    return echo


def _write_manifest(out_dir: Path, command: str, cfg: ExperimentConfig,
                    artifacts: list[Path], duration: float) -> Path:
    manifest = {
        "command": command,
        "version": __version__,
        "master_seed": cfg.seed,
        "config": _config_echo(cfg),
        "artifacts": [p.name for p in artifacts],
        "duration_s": duration,
    }
    path = out_dir / f"{command}_manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path


def _trajectory_rows(traj) -> list[list]:
    rows = []
    for rec in traj.records:
        tp = rec.test_point
        rows.append([
            rec.step, rec.policy, _idx(rec.selection.tx_idx), _idx(rec.selection.rx_idx),
            None if tp is None else tp.s, None if tp is None else tp.h,
            rec.bound_value, rec.post_mean, rec.post_var, rec.estimate, rec.sq_err,
        ])
    return rows


def cmd_run(cfg: ExperimentConfig, out_dir: Path, jobs: int) -> list[Path]:
    rows = []
    for ki, kind in enumerate(cfg.bound):
        traj = run_closed_loop(cfg, derive_seed(cfg.seed, 20, ki), policy=kind)
        rows.extend(_trajectory_rows(traj))
    path = out_dir / "trajectory.csv"
    _write_csv(path, ["step", "bound_kind", "sel_tx", "sel_rx", "s_star", "h_star",
                      "bound_value", "post_mean", "post_var", "estimate", "sq_err"], rows)
    return [path]


def cmd_sweep(cfg: ExperimentConfig, out_dir: Path, jobs: int) -> list[Path]:
    rows = [[r.snr_db, r.bound_kind, r.eval_step, r.n_traj, r.mse]
            for r in snr_sweep(cfg, jobs=jobs)]
    path = out_dir / "mse_vs_snr.csv"
    _write_csv(path, ["snr_db", "bound_kind", "eval_step", "n_traj", "mse"], rows)
    return [path]


def cmd_bounds(cfg: ExperimentConfig, out_dir: Path, jobs: int) -> list[Path]:
    geom = cfg.geometry()
    model = cfg.signal_model()
    sel = cfg.candidates()[0]
    positions = effective_positions(geom, sel, cfg.mode)
    points = grid_points([S_DOMAIN, H_DOMAIN], 16)
    values = wwb_values(points[:, 0], points[:, 1], UniformPosterior(-1.0, 1.0),
                        positions, model, geom.wavelength)
    rows = [[s, h, None if np.isnan(v) else float(v)]
            for (s, h), v in zip(points, values)]
    path = out_dir / "bound_surface.csv"
    _write_csv(path, ["s", "h", "value"], rows)
    return [path]


def cmd_policies(cfg: ExperimentConfig, out_dir: Path, jobs: int) -> list[Path]:
    rows = []
    for ki, kind in enumerate(cfg.bound):
        traj = run_closed_loop(cfg, derive_seed(cfg.seed, 20, ki), policy=kind)
        rows.extend([rec.step, rec.policy, _idx(rec.selection.tx_idx),
                     _idx(rec.selection.rx_idx)] for rec in traj.records)
    path = out_dir / "selections.csv"
    _write_csv(path, ["step", "bound_kind", "sel_tx", "sel_rx"], rows)
    return [path]


_COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "bounds": cmd_bounds,
    "policies": cmd_policies,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="doasel",
        description="Adaptive channel selection for DoA estimation: closed-loop experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "run one closed loop per configured bound kind"),
        ("sweep", "average MSE at eval_step over the configured SNR list"),
        ("bounds", "tabulate the WWB test-point surface on the uniform prior"),
        ("policies", "tabulate per-step channel selections per bound kind"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", type=Path, default=None, help="flat key = value file")
        cmd.add_argument("--seed", type=int, default=None, help="master seed (overrides config)")
        cmd.add_argument("--out", type=Path, default=Path("."), help="output directory")
        cmd.add_argument("--jobs", type=int, default=1, help="parallel trial workers")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        out_dir = args.out
        out_dir.mkdir(parents=True, exist_ok=True)
        started = time.perf_counter()
        artifacts = _COMMANDS[args.command](cfg, out_dir, args.jobs)
        _write_manifest(out_dir, args.command, cfg, artifacts,
                        time.perf_counter() - started)
    except Exception as err:  # noqa: BLE001 - single reporting point for the CLI
        print(f"doasel {args.command}: error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
