"""Run configuration files.

Grammar: INI sections as read by :mod:`configparser` (``key = value``, ``#``
or ``;`` comments, no interpolation).  Allowed sections and keys::

    [chain]      L, L_A, J, h0, omega
    [evolution]  dt, t_max, hamiltonian (driven|static|effective),
                 integrator (cfm4|midpoint|cell_average), krylov_dim_max,
                 krylov_tol, record_stride, allow_coarse_dt
    [initial]    state (static_ground|neel|random_product|domain_wall|plus_all), seed
    [analysis]   gap_threshold, parity_confidence, window,
                 renyi_orders, nu_grid, a_grid, omega_sat
    [sweep]      omegas, L_As, high_omega, high_omega_dt
    [output]     dir, dump_state

Lists are comma separated; grids are ``start:stop:step`` (inclusive).
Overrides ``section.key=value`` (or a bare ``key`` when it names exactly one
key) are applied after the file.  Unknown sections or keys are rejected.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .model import ChainSpec, ContractError, HamiltonianKind, Kind
from .propagator import INTEGRATORS, EvolutionConfig
from .run import INITIAL_STATES


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _floats(s: str) -> list:
    return [float(x) for x in s.split(",") if x.strip()]


def _ints(s: str) -> list:
    return [int(x) for x in s.split(",") if x.strip()]


def _grid(s: str) -> list:
    if ":" in s:
        a, b, step = (float(x) for x in s.split(":"))
        n = int(math.floor((b - a) / step + 1e-9)) + 1
        return [round(a + i * step, 12) for i in range(n)]
    return _floats(s)


def _orders(s: str) -> list:
    return [math.inf if x.strip() == "inf" else float(x) for x in s.split(",") if x.strip()]


SCHEMA = {
    "chain": {"L": int, "L_A": int, "J": float, "h0": float, "omega": float},
    "evolution": {
        "dt": float, "t_max": float, "hamiltonian": str, "integrator": str,
        "krylov_dim_max": int, "krylov_tol": float, "record_stride": int,
        "allow_coarse_dt": _bool,
    },
    "initial": {"state": str, "seed": int},
    "analysis": {
        "gap_threshold": float, "parity_confidence": float,
        "window": int, "renyi_orders": _orders, "nu_grid": _grid, "a_grid": _grid,
        "omega_sat": float,
    },
    "sweep": {"omegas": _floats, "L_As": _ints, "high_omega": float, "high_omega_dt": float},
    "output": {"dir": str, "dump_state": _bool},
}

DEFAULTS = {
    "chain": {"L": 12, "L_A": 4, "J": 1.0, "h0": 2.0, "omega": 5.0},
    "evolution": {
        "dt": 0.01, "t_max": 10.0, "hamiltonian": "driven", "integrator": "cfm4",
        "krylov_dim_max": 30, "krylov_tol": 1e-10, "record_stride": 1,
        "allow_coarse_dt": False,
    },
    "initial": {"state": "static_ground", "seed": 1234},
    "analysis": {
        "gap_threshold": 0.05, "parity_confidence": 0.5, "window": 5,
        "renyi_orders": [2.0], "nu_grid": _grid("0.5:1.5:0.05"), "a_grid": _grid("0.5:1.5:0.05"),
        "omega_sat": 30.0,
    },
    "sweep": {"omegas": [], "L_As": [], "high_omega": 30.0, "high_omega_dt": 0.002},
    "output": {"dir": "runs", "dump_state": False},
}


@dataclass
class RunConfig:
    values: dict = field(default_factory=lambda: {s: dict(v) for s, v in DEFAULTS.items()})

    def __getitem__(self, section):
        return self.values[section]

    def chain_spec(self, **changes) -> ChainSpec:
        c = {**self.values["chain"], **changes}
        return ChainSpec(int(c["L"]), int(c["L_A"]), float(c["J"]), float(c["h0"]), float(c["omega"]))

    def evolution_config(self, **changes) -> EvolutionConfig:
        e = {**self.values["evolution"], **changes}
        try:
            kind = Kind(e["hamiltonian"])
        except ValueError:
            raise ContractError(f"hamiltonian must be one of {[k.value for k in Kind]}") from None
        return EvolutionConfig(
            dt=e["dt"], t_max=e["t_max"], hamiltonian=HamiltonianKind(kind),
            krylov_dim_max=e["krylov_dim_max"], krylov_tol=e["krylov_tol"],
            record_stride=e["record_stride"], allow_coarse_dt=e["allow_coarse_dt"],
            integrator=e["integrator"],
        )

    def validate(self) -> None:
        spec = self.chain_spec()
        self.evolution_config().check(spec)
        if self["initial"]["state"] not in INITIAL_STATES:
            raise ContractError(f"initial.state must be one of {INITIAL_STATES}")
        if self["evolution"]["integrator"] not in INTEGRATORS:
            raise ContractError(f"evolution.integrator must be one of {INTEGRATORS}")

    def resolved(self) -> dict:
        """JSON-ready copy (grids and lists as plain lists, inf as a string)."""
        def conv(v):
            if isinstance(v, (list, tuple, np.ndarray)):
                return [conv(x) for x in v]
            if isinstance(v, float) and math.isinf(v):
                return "inf"
            return v
        return {s: {k: conv(v) for k, v in sec.items()} for s, sec in self.values.items()}


def _set(cfg: RunConfig, section: str, key: str, raw: str) -> None:
    if section not in SCHEMA:
        raise ContractError(f"unknown config section [{section}]")
    if key not in SCHEMA[section]:
        raise ContractError(f"unknown key {key!r} in [{section}]; allowed: {sorted(SCHEMA[section])}")
    try:
        cfg.values[section][key] = SCHEMA[section][key](raw.strip())
    except ValueError as exc:
        raise ContractError(f"{section}.{key}: {exc}") from None


def load(path=None, overrides=()) -> RunConfig:
    cfg = RunConfig()
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except configparser.Error as exc:
            raise ContractError(f"{path}: {exc}") from None
        for section in parser.sections():
            for key, raw in parser.items(section):
                _set(cfg, section, key, raw)
    for item in overrides:
        apply_override(cfg, item)
    return cfg


def apply_override(cfg: RunConfig, item: str) -> None:
    if "=" not in item:
        raise ContractError(f"override {item!r} is not key=value")
    key, raw = item.split("=", 1)
    key = key.strip()
    if "." in key:
        section, key = key.split(".", 1)
    else:
        owners = [s for s, keys in SCHEMA.items() if key in keys]
        if len(owners) != 1:
            raise ContractError(f"override key {key!r} is unknown or ambiguous; use section.key")
        section = owners[0]
    _set(cfg, section, key, raw)


def write_example(path) -> None:
    lines = []
    for section, keys in DEFAULTS.items():
        lines.append(f"[{section}]")
        for k, v in keys.items():
            if isinstance(v, list):
                v = ", ".join(str(x) for x in v)
            lines.append(f"{k} = {v}")
        lines.append("")
    Path(path).write_text("\n".join(lines))
