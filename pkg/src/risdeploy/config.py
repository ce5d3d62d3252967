"""Flat ``key = value`` run configuration.

Blank lines and ``#`` comments are ignored, unknown keys are rejected.
Angles are in degrees and powers in dB/dBm here; everything is converted
to radians and linear units when the domain objects are built.  The three
rotation keys also accept ``opt`` (point at the optimum for the scene).

Output files start with a commented copy of the resolved configuration
between :data:`HEADER_BEGIN` and :data:`HEADER_END`.  :func:`load_config`
accepts such a file directly, so any artifact can be regenerated from
itself.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .deployment import optimal_ris_rotation
from .fading import LinkBudget
from .geometry import DomainError, SceneGeometry, elevation_angles
from .radiometrics import DIRECTIVITY_MODES, PatternConfig
from .specfun import LOS, RicianSpec

HEADER_BEGIN = "--- resolved config ---"
HEADER_END = "--- end config ---"


class ConfigError(ValueError):
    pass


def _k(text: str) -> float:
    if text.strip().lower() in ("inf", "los", "infinity"):
        return LOS
    return float(text)


def _angle(text: str):
    t = text.strip().lower()
    return "opt" if t == "opt" else float(t)


def _mode(text: str) -> str:
    t = text.strip().lower()
    if t not in DIRECTIVITY_MODES:
        raise ValueError(f"expected one of {DIRECTIVITY_MODES}")
    return t


def _int(text: str) -> int:
    f = float(text)
    if f != int(f):
        raise ValueError("expected an integer")
    return int(f)


# key -> (parser, default)
SCENE_KEYS = {
    "h_t": (float, 0.0),
    "h_r": (float, 0.0),
    "R": (float, 1000.0),
    "l": (float, 100.0),
    "r": (float, 200.0),
    "h": (float, 100.0),
    "h_min": (float, 100.0),
    "h_max": (float, 600.0),
}
PATTERN_KEYS = {
    "q_t": (float, 20.0),
    "q_r": (float, 20.0),
    "q_u": (float, 4.0),
    "theta_t0_deg": (_angle, "opt"),
    "theta_r0_deg": (_angle, "opt"),
    "theta_0_deg": (_angle, 0.0),
    "directivity_mode": (_mode, "db"),
}
BUDGET_KEYS = {
    "p_t_dbm": (float, 10.0),
    "noise_density_dbm_hz": (float, -174.0),
    "bandwidth_hz": (float, 5e6),
    "rho0_db": (float, -40.0),
    "n_units": (_int, 64),
    "wavelength_m": (float, 0.125),
    "reflect_amp": (float, 1.0),
    "k1": (_k, 5.0),
    "k2": (_k, 5.0),
    "trials": (_int, 100_000),
    "seed": (_int, 0),
}
COMMAND_KEYS = {
    "workers": (_int, 1),
    "dr": (float, 1.0),
    "dh": (float, 1.0),
    "gamma_th_db": (float, 45.0),
    "moment_samples": (_int, 1_000_000),
}
ALL_KEYS = {**SCENE_KEYS, **PATTERN_KEYS, **BUDGET_KEYS, **COMMAND_KEYS}


def _fmt(value) -> str:
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


@dataclass
class RunConfig:
    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def replace(self, **changes) -> "RunConfig":
        vals = dict(self.values)
        for key, value in changes.items():
            if key not in ALL_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            vals[key] = value
        cfg = RunConfig(vals)
        cfg.validate()
        return cfg

    @property
    def scene(self) -> SceneGeometry:
        return SceneGeometry(**{k: self.values[k] for k in SCENE_KEYS})

    @property
    def budget(self) -> LinkBudget:
        keys = ("p_t_dbm", "noise_density_dbm_hz", "bandwidth_hz", "rho0_db",
                "n_units", "wavelength_m", "reflect_amp")
        return LinkBudget(**{k: self.values[k] for k in keys})

    @property
    def spec(self) -> RicianSpec:
        return RicianSpec(K1=self.values["k1"], K2=self.values["k2"])

    @property
    def directivity_mode(self) -> str:
        return self.values["directivity_mode"]

    def pattern(self, scene: SceneGeometry | None = None) -> PatternConfig:
        """Pattern with ``opt`` rotations resolved for ``scene``."""
        scene = scene or self.scene
        ang = elevation_angles(scene)
        optimum = {
            "theta_t0_deg": ang.theta_t_aod,
            "theta_r0_deg": ang.theta_r_aoa,
            "theta_0_deg": optimal_ris_rotation(ang),
        }
        rot = {}
        for key, opt in optimum.items():
            v = self.values[key]
            rot[key[:-4]] = opt if v == "opt" else math.radians(v)
        return PatternConfig(q_t=self["q_t"], q_r=self["q_r"], q_u=self["q_u"], **rot)

    def validate(self) -> None:
        try:
            scene = self.scene
            self.budget
            self.spec
            self.pattern(scene)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
        for key in ("trials", "seed", "moment_samples"):
            if self.values[key] < 0:
                raise ConfigError(f"{key} must be >= 0")
        if self.values["workers"] < 1:
            raise ConfigError("workers must be >= 1")
        if not (self.values["dr"] > 0 and self.values["dh"] > 0):
            raise ConfigError("grid steps dr, dh must be positive")

    def resolved_lines(self) -> list[str]:
        return [f"{k} = {_fmt(self.values[k])}" for k in ALL_KEYS]

    def as_dict(self) -> dict:
        return {k: _fmt(v) if isinstance(v, float) and math.isinf(v) else v
                for k, v in self.values.items()}

    def header(self) -> str:
        lines = [HEADER_BEGIN, *self.resolved_lines(), HEADER_END]
        return "".join(f"# {line}\n" for line in lines)


def parse_config(text: str, overrides: dict | None = None) -> RunConfig:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        raw[key] = value
    return build_config(raw, overrides)


def build_config(raw: dict, overrides: dict | None = None) -> RunConfig:
    values = {k: default for k, (_, default) in ALL_KEYS.items()}
    for key, value in {**raw, **(overrides or {})}.items():
        if key not in ALL_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        parser = ALL_KEYS[key][0]
        try:
            values[key] = parser(value) if isinstance(value, str) else parser(str(value))
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {value!r} ({exc})") from None
    cfg = RunConfig(values)
    cfg.validate()
    return cfg


def _header_block(text: str) -> str | None:
    lines = text.splitlines()
    try:
        start = next(i for i, ln in enumerate(lines) if ln.strip() == f"# {HEADER_BEGIN}")
    except StopIteration:
        return None
    block = []
    for ln in lines[start + 1:]:
        if ln.strip() == f"# {HEADER_END}":
            return "\n".join(block)
        block.append(ln.lstrip()[1:].strip() if ln.lstrip().startswith("#") else ln)
    raise ConfigError("unterminated resolved-config block")


def load_config(path: str | Path | None, overrides: dict | None = None) -> RunConfig:
    """Read a config file, a previous CSV/text output, or a previous JSON output."""
    if path is None:
        return build_config({}, overrides)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    block = _header_block(text)
    if block is not None:
        return parse_config(block, overrides)
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON config: {exc}") from None
        raw = doc.get("resolved_config", doc)
        return build_config({k: str(v) for k, v in raw.items()}, overrides)
    return parse_config(text, overrides)
