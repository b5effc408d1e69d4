"""Experiment orchestration: output trees, CSV emission, manifests.

A run directory is laid out as

    manifest.json     config digest, code version, status, timestamps
    energy.csv        ledger samples with balance residuals
    norms.csv         space-time norm table with scaling tags
    snapshots/        binary states; final.admb always, numbered ones
                      every snapshot_interval-th observer sample

A family directory holds manifest.json plus convergence.csv.  Output
roots resolve as: explicit argument, then the ADMBOUSS_OUTPUT_ROOT
environment variable, then the working directory.  A non-empty target
directory is refused rather than overwritten.  All CSV floats are
written by repr, so equal runs produce byte-identical tables.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .config import ConfigError, RunConfig
from .convergence import ConvergenceReport, FamilyPlan, run_family
from .deconv import (DeconvolutionSpec, deconv_symbol, filter_symbol,
                     inverse_filter_symbol)
from .diagnostics import a_priori_bound, attach_balance_residuals, norm_table
from .dynamics import ModelParams
from .initial import make_initial
from .snapshot import read_snapshot, write_snapshot
from .spectral import build_grid, sobolev_norm
from .stepping import SolverState, StepControl, init_state, integrate

import numpy as np

__all__ = [
    "OutputError",
    "FamilyError",
    "run",
    "family",
    "resume",
    "check_symbols",
]

ENV_OUTPUT_ROOT = "ADMBOUSS_OUTPUT_ROOT"


class OutputError(OSError):
    """Output location exists and is not an empty directory."""


class FamilyError(RuntimeError):
    """A family run finished incomplete."""


def _resolve_output(config: RunConfig, out_root) -> Path:
    directory = Path(config.directory)
    if directory.is_absolute():
        return directory
    root = out_root if out_root is not None else os.environ.get(ENV_OUTPUT_ROOT)
    return Path(root) / directory if root else directory


def _prepare_dir(path: Path) -> Path:
    if path.exists():
        if not path.is_dir():
            raise OutputError(f"{path} exists and is not a directory")
        if any(path.iterdir()):
            raise OutputError(f"refusing to write into non-empty {path}")
    else:
        path.mkdir(parents=True)
    return path


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, fieldnames, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _config_digest(config: RunConfig, config_text: str | None) -> str:
    text = config_text if config_text is not None else repr(config)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _manifest(outdir: Path, payload: dict) -> None:
    with open(outdir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _energy_rows(records):
    from .diagnostics import EnergyRecord

    rows = [tuple(getattr(r, f) for f in EnergyRecord.CSV_FIELDS)
            for r in records]
    return EnergyRecord.CSV_FIELDS, rows


def _write_energy(outdir: Path, records) -> list:
    if len(records) >= 3:
        records = attach_balance_residuals(records)
    fields, rows = _energy_rows(records)
    _write_csv(outdir / "energy.csv", fields, rows)
    return list(records)


class SnapshotObserver:
    """Writes every interval-th observed state; interval 0 disables."""

    def __init__(self, directory: Path, interval: int):
        self.directory = directory
        self.interval = interval
        self.count = 0
        self.last = None

    def __call__(self, state: SolverState) -> None:
        if self.interval > 0 and self.count % self.interval == 0:
            self.directory.mkdir(exist_ok=True)
            write_snapshot(
                self.directory / f"snap_{self.count:06d}.admb", state)
        self.last = state
        self.count += 1

    def flush(self) -> None:
        # called on aborts so the most recent state survives for resume
        if self.last is not None:
            self.directory.mkdir(exist_ok=True)
            write_snapshot(self.directory / "abort.admb", self.last)


def _build_control(config: RunConfig, strict: bool) -> StepControl:
    return StepControl(dt=config.dt, t_end=config.t_end,
                       cfl_safety=config.cfl_safety,
                       observer_cadence=config.observer_cadence,
                       strict_invariants=strict)


def _march(outdir: Path, state: SolverState, control: StepControl,
           interval: int, manifest_base: dict):
    """Integrate, writing the output tree; failures leave a failed manifest."""
    samples = []
    snaps = SnapshotObserver(outdir / "snapshots", interval)
    try:
        final, records = integrate(state, control,
                                   observers=(samples.append, snaps))
    except Exception as exc:
        records = getattr(exc, "partial_records", [])
        if records:
            _write_energy(outdir, records)
        _manifest(outdir, dict(
            manifest_base,
            status=f"failed: {type(exc).__name__}: {exc}",
            finished=_utc_now()))
        raise

    records = _write_energy(outdir, records)
    table = norm_table(samples)
    _write_csv(outdir / "norms.csv",
               ("variable", "norm", "value", "expected_order"), table.rows())
    (outdir / "snapshots").mkdir(exist_ok=True)
    write_snapshot(outdir / "snapshots" / "final.admb", final)
    return final, records, samples


def run(config: RunConfig, out_root=None, strict: bool = False,
        config_text: str | None = None) -> Path:
    """Execute a single solve described by the config; returns the outdir."""
    if config.orders is not None:
        raise ConfigError("a single run needs physics.order, not orders")
    if config.epsilon is None:
        raise ConfigError("a single run needs physics.epsilon")

    outdir = _prepare_dir(_resolve_output(config, out_root))
    grid = build_grid(config.box_length, config.modes_per_axis,
                      truncation_radius=config.truncation_radius)
    spec = DeconvolutionSpec(grid, alpha=config.alpha, order=config.order)
    params = ModelParams(deconv=spec, nu=config.nu, epsilon=config.epsilon)
    u0, theta0 = make_initial(grid, config.preset, config.preset_options)
    u0_norm = sobolev_norm(u0)
    theta0_norm = sobolev_norm(theta0)
    state = init_state(params, u0, theta0)
    control = _build_control(config, strict)

    base = {
        "command": "run",
        "code_version": __version__,
        "config_sha256": _config_digest(config, config_text),
        "created": _utc_now(),
    }
    final, records, _ = _march(outdir, state, control,
                               config.snapshot_interval, base)

    monitored, ceiling = a_priori_bound(records, u0_norm, theta0_norm,
                                        config.nu, config.epsilon)
    ratio = float((monitored / ceiling).max())
    _manifest(outdir, dict(
        base,
        status="ok",
        finished=_utc_now(),
        final_time=final.time,
        record_count=len(records),
        a_priori_max_ratio=ratio))
    return outdir


def resume(snapshot_path, config: RunConfig, out_root=None,
           strict: bool = False, config_text: str | None = None) -> Path:
    """Continue a saved state to config.t_end; grid and physics must match."""
    if config.orders is not None:
        raise ConfigError("resume needs physics.order, not orders")
    if config.epsilon is None:
        raise ConfigError("resume needs physics.epsilon")

    state = read_snapshot(snapshot_path)
    grid = state.w.grid
    params = state.params
    mismatches = []
    for name, want, got in (
            ("grid.box_length", config.box_length, grid.box_length),
            ("grid.modes_per_axis", config.modes_per_axis, grid.modes_per_axis),
            ("grid.truncation_radius", config.truncation_radius,
             grid.truncation_radius),
            ("physics.nu", config.nu, params.nu),
            ("physics.alpha", config.alpha, params.deconv.alpha),
            ("physics.epsilon", config.epsilon, params.epsilon),
            ("physics.order", config.order, params.deconv.order)):
        if want != got:
            mismatches.append(f"{name}: config {want!r} vs snapshot {got!r}")
    if mismatches:
        raise ConfigError("config does not match snapshot: "
                          + "; ".join(mismatches))

    outdir = _prepare_dir(_resolve_output(config, out_root))
    control = _build_control(config, strict)
    base = {
        "command": "resume",
        "code_version": __version__,
        "config_sha256": _config_digest(config, config_text),
        "source_snapshot": str(snapshot_path),
        "source_time": state.time,
        "created": _utc_now(),
    }
    final, records, _ = _march(outdir, state, control,
                               config.snapshot_interval, base)
    _manifest(outdir, dict(
        base,
        status="ok",
        finished=_utc_now(),
        final_time=final.time,
        record_count=len(records)))
    return outdir


def family(config: RunConfig, out_root=None, strict: bool = False,
           config_text: str | None = None) -> Path:
    """Run the family of solves over physics.orders; returns the outdir."""
    if config.orders is None:
        raise ConfigError("a family run needs physics.orders")
    if config.epsilon_coefficient is None:
        raise ConfigError("a family run needs physics.epsilon_rule")

    outdir = _prepare_dir(_resolve_output(config, out_root))
    grid = build_grid(config.box_length, config.modes_per_axis,
                      truncation_radius=config.truncation_radius)
    u0, theta0 = make_initial(grid, config.preset, config.preset_options)
    control = _build_control(config, strict)
    plan = FamilyPlan(u0=u0, theta0=theta0, alpha=config.alpha, nu=config.nu,
                      orders=config.orders, control=control,
                      epsilon_coefficient=config.epsilon_coefficient,
                      max_workers=config.max_workers)

    base = {
        "command": "family",
        "code_version": __version__,
        "config_sha256": _config_digest(config, config_text),
        "created": _utc_now(),
    }
    report = run_family(plan)
    _write_csv(outdir / "convergence.csv", ConvergenceReport.CSV_FIELDS,
               report.rows())
    status = "ok" if report.complete else f"failed: {report.failure}"
    _manifest(outdir, dict(
        base,
        status=status,
        finished=_utc_now(),
        complete=report.complete,
        reference_order=report.reference_order))
    if not report.complete:
        raise FamilyError(report.failure)
    return outdir


def check_symbols(alpha: float, order: int, modes: int):
    """Tabulate the multiplier bounds over every retained wavenumber.

    Returns (lines, ok): a formatted per-|k|^2 table of the filter,
    inverse, and deconvolution symbols against the cap min(N+1, 1 +
    alpha^2 |k|^2), and whether every row satisfies the two-sided bound.
    """
    grid = build_grid(2.0 * np.pi, modes)
    DeconvolutionSpec(grid, alpha=alpha, order=order).validate()

    ksq = np.unique(grid.index_sq[grid.mode_mask]).astype(np.float64)
    g = filter_symbol(alpha, ksq)
    a = inverse_filter_symbol(alpha, ksq)
    d = deconv_symbol(alpha, order, ksq)
    cap = np.minimum(order + 1.0, a)
    good = (d >= 1.0 - 1e-12) & (d <= cap * (1.0 + 1e-12) + 1e-12)

    lines = [f"alpha={alpha:g} order={order} modes={modes}",
             f"{'|k|^2':>8} {'filter':>12} {'inverse':>12} "
             f"{'deconv':>12} {'cap':>12} {'ok':>3}"]
    for i, v in enumerate(ksq):
        lines.append(f"{int(v):>8} {g[i]:>12.6e} {a[i]:>12.6e} "
                     f"{d[i]:>12.6e} {cap[i]:>12.6e} {'yes' if good[i] else 'NO'}")
    ok = bool(good.all())
    lines.append(
        f"{'all' if ok else 'NOT all'} {ksq.size} distinct wavenumbers "
        f"satisfy 1 <= deconv <= min(order+1, inverse)")
    return lines, ok
