"""Run configuration: a small line-oriented text format.

``[section]`` headers, ``key = value`` pairs, ``#`` comments.  Unknown keys
are errors; values are validated against their declared ranges.
"""

from __future__ import annotations

from dataclasses import dataclass, fields as dc_fields
from typing import Optional


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    scenario: str = ""
    cells: Optional[int] = None
    distortion: Optional[float] = None
    seed: Optional[int] = None
    cfl: Optional[float] = None
    t_final: Optional[float] = None
    scheme: Optional[str] = None
    tau_max: Optional[float] = None
    gravity: Optional[float] = None
    eps_reg: Optional[float] = None
    h_max_ref: Optional[float] = None
    relaxation: Optional[bool] = None
    output_dir: str = "out"
    cadence: Optional[float] = None
    fmt: str = "csv"
    write_probes: bool = True
    track_conservation: bool = True

    def validate(self):
        if not self.scenario:
            raise ConfigError("missing required key 'scenario' in section [run]")
        if self.cfl is not None and not 0.0 < self.cfl <= 1.0:
            raise ConfigError(f"cfl = {self.cfl:g} out of range (0, 1]")
        if self.cadence is not None and self.cadence <= 0.0:
            raise ConfigError(f"cadence = {self.cadence:g} must be positive")
        if self.cells is not None and self.cells < 2:
            raise ConfigError(f"cells = {self.cells} must be at least 2")
        if self.distortion is not None and not 0.0 <= self.distortion < 0.5:
            raise ConfigError(f"distortion = {self.distortion:g} out of range [0, 0.5)")
        if self.t_final is not None and self.t_final <= 0.0:
            raise ConfigError("t_final must be positive")
        if self.tau_max is not None and self.tau_max <= 0.0:
            raise ConfigError("tau_max must be positive")
        if self.eps_reg is not None and self.eps_reg < 0.0:
            raise ConfigError("eps_reg must be nonnegative")
        if self.gravity is not None and self.gravity <= 0.0:
            raise ConfigError("gravity must be positive")
        if self.h_max_ref is not None and self.h_max_ref <= 0.0:
            raise ConfigError("h_max_ref must be positive")
        if self.fmt not in ("csv", "vtk", "both"):
            raise ConfigError(f"format = {self.fmt!r} must be csv, vtk or both")
        return self


def _parse_bool(raw):
    v = raw.strip().lower()
    if v in ("1", "on", "true", "yes"):
        return True
    if v in ("0", "off", "false", "no"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


# (section, key) -> (attribute, parser)
_SCHEMA = {
    ("run", "scenario"): ("scenario", str),
    ("run", "output"): ("output_dir", str),
    ("mesh", "cells"): ("cells", int),
    ("mesh", "distortion"): ("distortion", float),
    ("mesh", "seed"): ("seed", int),
    ("time", "cfl"): ("cfl", float),
    ("time", "t_final"): ("t_final", float),
    ("time", "scheme"): ("scheme", str),
    ("time", "tau_max"): ("tau_max", float),
    ("model", "gravity"): ("gravity", float),
    ("model", "eps_reg"): ("eps_reg", float),
    ("model", "h_max_ref"): ("h_max_ref", float),
    ("model", "relaxation"): ("relaxation", _parse_bool),
    ("output", "cadence"): ("cadence", float),
    ("output", "directory"): ("output_dir", str),
    ("output", "format"): ("fmt", str),
    ("output", "probes"): ("write_probes", _parse_bool),
    ("output", "conservation"): ("track_conservation", _parse_bool),
}


def parse_config(text) -> RunConfig:
    """Parse and validate a config; errors carry the offending line number."""
    cfg = RunConfig()
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if not any(s == section for s, _ in _SCHEMA):
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if section is None:
            raise ConfigError(f"line {lineno}: key outside of any [section]")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        try:
            attr, parser = _SCHEMA[(section, key)]
        except KeyError:
            raise ConfigError(f"line {lineno}: unknown key '{key}' in section [{section}]")
        try:
            setattr(cfg, attr, parser(value))
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"line {lineno}: bad value for '{key}': {exc}")
    return cfg.validate()


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
