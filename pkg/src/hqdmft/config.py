"""Plain ``key = value`` run configuration.

Entries are separated by newlines or commas and ``#`` starts a comment.
List values (``U_list``) use semicolons or whitespace between items.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Any, Callable

import numpy as np

from .dmft import DmftConfig
from .exceptions import ConfigError
from .greens import MatsubaraGrid, TimeGrid
from .model import SiamParams
from .solver import AspSchedule


def _float_list(text: str) -> tuple:
    items = text.replace(";", " ").split()
    if not items:
        raise ValueError("empty list")
    return tuple(float(x) for x in items)


@dataclass(frozen=True)
class _Key:
    convert: Callable[[str], Any]
    low: float | None = None
    high: float | None = None
    choices: tuple | None = None
    open_low: bool = False


SCHEMA: dict[str, _Key] = {
    "U": _Key(float, 0.0, 20.0),
    "V": _Key(float, 0.01, 2.0),
    "V0": _Key(float, 0.01, 2.0),
    "delta_V": _Key(float, 0.0, 1.0, open_low=True),
    "beta": _Key(float, 0.0, 1e4, open_low=True),
    "n_max": _Key(int, 1, 100000),
    "eta_matsubara": _Key(float, 0.0, 10.0),
    "eta_real": _Key(float, 0.0, 10.0, open_low=True),
    "t_max": _Key(float, 0.0, 1e5, open_low=True),
    "dt": _Key(float, 0.0, 10.0, open_low=True),
    "omega_min": _Key(float, -100.0, 100.0),
    "omega_max": _Key(float, -100.0, 100.0),
    "d_omega": _Key(float, 0.0, 10.0, open_low=True),
    "mode": _Key(str, choices=("exact", "trotter")),
    "trotter_n": _Key(int, 1, 100000),
    "ground_state": _Key(str, choices=("ed", "asp")),
    "asp_T": _Key(float, 0.0, 1e4, open_low=True),
    "asp_M": _Key(int, 1, 100000),
    "max_iters": _Key(int, 1, 100000),
    "tol_f": _Key(float, 0.0, 1.0, open_low=True),
    "max_step": _Key(float, 0.0, 2.0, open_low=True),
    "window": _Key(int, 1, 100000),
    "U_list": _Key(_float_list),
    "layout": _Key(str.upper, choices=("FFFHH", "AAAA", "ABBB", "AABB")),
    "gamma_ratio": _Key(float, 0.0, 100.0, open_low=True),
}


@dataclass(frozen=True)
class RunConfig:
    U: float = 1.0
    V: float = 0.5
    V0: float = 0.5
    delta_V: float = 0.05
    beta: float = 200.0
    n_max: int = 2
    eta_matsubara: float = 0.3
    eta_real: float = 0.1
    t_max: float = 200.0
    dt: float = 0.02
    omega_min: float = -6.0
    omega_max: float = 6.0
    d_omega: float = 0.01
    mode: str = "exact"
    trotter_n: int = 1
    ground_state: str = "ed"
    asp_T: float = 4.0
    asp_M: int = 50
    max_iters: int = 100
    tol_f: float = 1e-6
    max_step: float = 0.1
    window: int = 5
    U_list: tuple = (0.0, 1.0, 2.0)
    layout: str = "FFFHH"
    gamma_ratio: float = 0.9407

    def __post_init__(self):
        for f in fields(self):
            _check_range(f.name, getattr(self, f.name))
        if self.omega_max <= self.omega_min:
            raise ConfigError(f"omega_max ({self.omega_max}) must exceed omega_min ({self.omega_min})")

    @property
    def time_grid(self) -> TimeGrid:
        return TimeGrid(0.0, self.dt, self.t_max)

    @property
    def matsubara_grid(self) -> MatsubaraGrid:
        return MatsubaraGrid(self.beta, self.n_max)

    @property
    def schedule(self) -> AspSchedule:
        return AspSchedule(self.asp_T, self.asp_M)

    def omega(self) -> np.ndarray:
        n = int(round((self.omega_max - self.omega_min) / self.d_omega)) + 1
        return np.linspace(self.omega_min, self.omega_max, n)

    def params(self, U: float | None = None, V: float | None = None) -> SiamParams:
        return SiamParams.half_filled(self.U if U is None else U, self.V if V is None else V)

    def dmft_config(self, U: float | None = None) -> DmftConfig:
        return DmftConfig(
            params=self.params(U, self.V0), V0=self.V0, delta_V=self.delta_V,
            grid=self.matsubara_grid, eta_matsubara=self.eta_matsubara,
            time_grid=self.time_grid, mode=self.mode, trotter_n=self.trotter_n,
            ground_state=self.ground_state, schedule=self.schedule,
            max_iters=self.max_iters, tol_f=self.tol_f, max_step=self.max_step,
        )


def _check_range(name: str, value):
    spec = SCHEMA[name]
    if spec.choices is not None and value not in spec.choices:
        raise ConfigError(f"{name} must be one of {list(spec.choices)}, got {value!r}")
    if spec.low is None:
        return
    below = value <= spec.low if spec.open_low else value < spec.low
    if below or value > spec.high or (isinstance(value, float) and math.isnan(value)):
        bracket = "(" if spec.open_low else "["
        raise ConfigError(f"{name}={value} outside valid range {bracket}{spec.low}, {spec.high}]")


def convert_value(key: str, raw: str):
    if key not in SCHEMA:
        raise ConfigError(f"unknown config key {key!r}")
    try:
        return SCHEMA[key].convert(raw.strip())
    except ValueError as exc:
        raise ConfigError(f"cannot parse {key}={raw.strip()!r}: {exc}") from None


def parse_entries(text: str) -> dict:
    values: dict = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        for entry in line.split(","):
            if not entry.strip():
                continue
            key, sep, raw = entry.partition("=")
            if not sep:
                raise ConfigError(f"expected key = value, got {entry.strip()!r}")
            key = key.strip()
            values[key] = convert_value(key, raw)
    return values


def parse_config(text: str = "", overrides: dict | None = None) -> RunConfig:
    values = parse_entries(text)
    for key, raw in (overrides or {}).items():
        values[key] = convert_value(key, raw) if isinstance(raw, str) else raw
    return RunConfig(**values)
