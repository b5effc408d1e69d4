"""Run-configuration parsing with strict schema validation.

Configs are TOML documents with four or five tables:

    [grid]     box_length (default 2 pi), modes_per_axis, truncation_radius
    [physics]  nu, alpha, exactly one of epsilon | epsilon_rule,
               exactly one of order | orders
    [time]     dt, t_end, cfl_safety (default 0.5),
               observer_cadence (default 10)
    [initial]  preset plus that preset's option keys
    [output]   directory (default "out"), snapshot_interval (default 0,
               meaning final snapshot only), max_workers (family runs)

epsilon_rule is the coefficient c of the schedule epsilon(N) = c/(N+1)
and requires the orders list.  Unknown tables or keys are rejected by
dotted name; syntax errors keep the parser's line information.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

try:
    import tomllib
except ImportError:  # Python 3.10
    import tomli as tomllib

from .initial import PRESETS

__all__ = ["ConfigError", "RunConfig", "parse_config", "load_config"]


class ConfigError(ValueError):
    """Invalid configuration text, schema violation, or value range."""


@dataclass(frozen=True)
class RunConfig:
    box_length: float
    modes_per_axis: int
    truncation_radius: int | None
    nu: float
    alpha: float
    epsilon: float | None
    epsilon_coefficient: float | None
    order: int | None
    orders: tuple | None
    dt: float
    t_end: float
    cfl_safety: float
    observer_cadence: int
    preset: str
    preset_options: dict
    directory: str
    snapshot_interval: int
    max_workers: int


def _type_name(value) -> str:
    return type(value).__name__


def _want_float(table, section, key, default=None, required=False):
    if key not in table:
        if required:
            raise ConfigError(f"missing required key {section}.{key}")
        return default
    v = table.pop(key)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(
            f"{section}.{key} must be a number, got {_type_name(v)}")
    return float(v)


def _want_int(table, section, key, default=None, required=False):
    if key not in table:
        if required:
            raise ConfigError(f"missing required key {section}.{key}")
        return default
    v = table.pop(key)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(
            f"{section}.{key} must be an integer, got {_type_name(v)}")
    return int(v)


def _want_str(table, section, key, default=None, required=False):
    if key not in table:
        if required:
            raise ConfigError(f"missing required key {section}.{key}")
        return default
    v = table.pop(key)
    if not isinstance(v, str):
        raise ConfigError(
            f"{section}.{key} must be a string, got {_type_name(v)}")
    return v


def _reject_leftovers(table, section):
    if table:
        key = sorted(table)[0]
        raise ConfigError(f"unknown key {section}.{key}")


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse and validate a TOML config; all violations name their key."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: TOML syntax error: {exc}") from exc

    known_sections = {"grid", "physics", "time", "initial", "output"}
    for section in doc:
        if section not in known_sections:
            raise ConfigError(f"unknown table [{section}]")
    for section in ("grid", "physics", "time", "initial"):
        if section not in doc:
            raise ConfigError(f"missing required table [{section}]")
        if not isinstance(doc[section], dict):
            raise ConfigError(f"[{section}] must be a table")

    grid = dict(doc["grid"])
    box_length = _want_float(grid, "grid", "box_length", default=2.0 * math.pi)
    modes = _want_int(grid, "grid", "modes_per_axis", required=True)
    radius = _want_int(grid, "grid", "truncation_radius", default=None)
    _reject_leftovers(grid, "grid")
    if box_length <= 0:
        raise ConfigError("grid.box_length must be positive")
    if modes < 4 or modes % 2 != 0:
        raise ConfigError("grid.modes_per_axis must be even and at least 4")
    if radius is not None and radius < 0:
        raise ConfigError("grid.truncation_radius must be nonnegative")

    phys = dict(doc["physics"])
    nu = _want_float(phys, "physics", "nu", required=True)
    alpha = _want_float(phys, "physics", "alpha", required=True)
    epsilon = _want_float(phys, "physics", "epsilon", default=None)
    eps_rule = _want_float(phys, "physics", "epsilon_rule", default=None)
    order = _want_int(phys, "physics", "order", default=None)
    orders_raw = phys.pop("orders", None)
    _reject_leftovers(phys, "physics")
    if nu <= 0:
        raise ConfigError("physics.nu must be positive")
    if alpha <= 0:
        raise ConfigError("physics.alpha must be positive")
    if (epsilon is None) == (eps_rule is None):
        raise ConfigError(
            "physics needs exactly one of epsilon or epsilon_rule")
    if epsilon is not None and not 0 < epsilon < 1:
        raise ConfigError("physics.epsilon must lie in (0, 1)")
    if eps_rule is not None and not 0 < eps_rule < 1:
        raise ConfigError("physics.epsilon_rule must lie in (0, 1)")
    orders = None
    if orders_raw is not None:
        if (not isinstance(orders_raw, list) or not orders_raw
                or any(isinstance(v, bool) or not isinstance(v, int)
                       for v in orders_raw)):
            raise ConfigError("physics.orders must be a nonempty integer list")
        orders = tuple(int(v) for v in orders_raw)
        if any(v < 0 for v in orders):
            raise ConfigError("physics.orders entries must be nonnegative")
    if (order is None) == (orders is None):
        raise ConfigError("physics needs exactly one of order or orders")
    if order is not None and order < 0:
        raise ConfigError("physics.order must be nonnegative")
    if eps_rule is not None and orders is None:
        raise ConfigError("physics.epsilon_rule requires physics.orders")

    time = dict(doc["time"])
    dt = _want_float(time, "time", "dt", required=True)
    t_end = _want_float(time, "time", "t_end", required=True)
    cfl_safety = _want_float(time, "time", "cfl_safety", default=0.5)
    cadence = _want_int(time, "time", "observer_cadence", default=10)
    _reject_leftovers(time, "time")
    if dt <= 0:
        raise ConfigError("time.dt must be positive")
    if t_end < 0:
        raise ConfigError("time.t_end must be nonnegative")
    if cfl_safety <= 0:
        raise ConfigError("time.cfl_safety must be positive")
    if cadence < 1:
        raise ConfigError("time.observer_cadence must be at least 1")

    init = dict(doc["initial"])
    preset = _want_str(init, "initial", "preset", required=True)
    if preset not in PRESETS:
        raise ConfigError(
            f"initial.preset must be one of {sorted(PRESETS)}, got {preset!r}")
    allowed = PRESETS[preset]
    options = {}
    for key in list(init):
        if key not in allowed:
            raise ConfigError(f"unknown key initial.{key} for preset {preset!r}")
        value = init.pop(key)
        if isinstance(allowed[key], int) and not isinstance(allowed[key], bool):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"initial.{key} must be an integer")
        elif isinstance(allowed[key], float):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"initial.{key} must be a number")
            value = float(value)
        options[key] = value
    _reject_leftovers(init, "initial")

    out = dict(doc.get("output", {}))
    directory = _want_str(out, "output", "directory", default="out")
    snapshot_interval = _want_int(out, "output", "snapshot_interval", default=0)
    max_workers = _want_int(out, "output", "max_workers", default=1)
    _reject_leftovers(out, "output")
    if snapshot_interval < 0:
        raise ConfigError("output.snapshot_interval must be nonnegative")
    if max_workers < 1:
        raise ConfigError("output.max_workers must be at least 1")

    return RunConfig(
        box_length=box_length, modes_per_axis=modes, truncation_radius=radius,
        nu=nu, alpha=alpha, epsilon=epsilon, epsilon_coefficient=eps_rule,
        order=order, orders=orders, dt=dt, t_end=t_end,
        cfl_safety=cfl_safety, observer_cadence=cadence, preset=preset,
        preset_options=options, directory=directory,
        snapshot_interval=snapshot_interval, max_workers=max_workers)


def load_config(path) -> RunConfig:
    """Read and parse a config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, source=str(path))
