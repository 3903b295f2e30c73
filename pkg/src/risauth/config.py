"""Experiment files: JSON parsing, validation and sweep/series parameter overrides."""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any

from .adversary import AttackKind, AttackSpec, RelayGain
from .channel import RicianParams, RisMode, ScenarioGeometry
from .circuit import CircuitParams, NoiseParams, dbm_to_watts
from .errors import ConfigError
from .sim import TrialConfig

SWEEP_PARAMS = ("d_TL", "d_RL", "d_EL", "n_elements", "p_s", "sigma2_l", "n_eve", "attack_kind")
FORMATS = ("csv", "json")
TOP_KEYS = {
    "name", "geometry", "rician", "circuit", "noise", "p_s", "ris_mode", "attack", "n_trials",
    "master_seed", "n_pilots", "channel_drift", "drift_rho", "sweep", "series", "output_dir", "formats",
}
_POWER_RE = re.compile(r"^\s*([-+0-9.eE]+)\s*(dBm|mW|uW|W)\s*$")
_POWER_UNITS = {"W": 1.0, "mW": 1e-3, "uW": 1e-6}


@dataclass(frozen=True)
class Series:
    label: str
    overrides: dict


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    base: TrialConfig
    sweep: tuple[str, tuple] | None = None
    series: tuple[Series, ...] = ()
    output_dir: Path = Path("results")
    formats: tuple[str, ...] = FORMATS

    def __post_init__(self):
        if self.sweep is not None and not self.sweep[1]:
            raise ConfigError("sweep.values", "sweep values must be nonempty")
        if not self.formats or any(f not in FORMATS for f in self.formats):
            raise ConfigError("formats", f"formats must be a nonempty subset of {FORMATS}")


def parse_power(value, key: str) -> float:
    """Watts from a bare number (watts) or a string with a dBm/W/mW/uW suffix."""
    if isinstance(value, bool):
        raise ConfigError(key, "expected a power value")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _POWER_RE.match(value)
        if m:
            number, unit = float(m.group(1)), m.group(2)
            return dbm_to_watts(number) if unit == "dBm" else number * _POWER_UNITS[unit]
    raise ConfigError(key, f"cannot parse power {value!r}; use a number in watts or e.g. '1 dBm'")


def _complex(value, key: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(isinstance(v, (int, float)) for v in value):
        return complex(value[0], value[1])
    raise ConfigError(key, "expected a number or [re, im]")


def _build(cls, section: str, data: Any, convert: dict | None = None):
    """Construct a dataclass from a dict, rejecting unknown keys and naming failing fields."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(section, "expected an object")
    names = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{section}.{unknown[0]}", "unknown key")
    kwargs = {}
    for k, v in data.items():
        fn = (convert or {}).get(k)
        kwargs[k] = fn(v, f"{section}.{k}") if fn else v
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        word = re.match(r"(\w+)", str(exc))
        key = f"{section}.{word.group(1)}" if word and word.group(1) in names else section
        raise ConfigError(key, str(exc)) from None


def _enum(enum_cls):
    def convert(value, key):
        try:
            return enum_cls(value)
        except ValueError:
            choices = ", ".join(e.value for e in enum_cls)
            raise ConfigError(key, f"unknown value {value!r}; expected one of {choices}") from None
    return convert


def _attack(data, key="attack") -> AttackSpec | None:
    if data is None:
        return None
    return _build(AttackSpec, key, data, {"kind": _enum(AttackKind), "relay_gain": _enum(RelayGain)})


def apply_param(cfg: TrialConfig, name: str, value) -> TrialConfig:
    """Return ``cfg`` with one sweepable parameter replaced."""
    key = f"sweep.{name}"
    try:
        if name in ("d_TL", "d_RL", "d_EL", "n_elements"):
            return cfg.with_geometry(**{name: value})
        if name == "p_s":
            return replace(cfg, p_s=parse_power(value, key))
        if name == "sigma2_l":
            return replace(cfg, noise=replace(cfg.noise, sigma2_l=parse_power(value, key)))
        if name == "n_eve":
            return replace(cfg, attack=replace(cfg.attack or AttackSpec(), n_eve=int(value)))
        if name == "attack_kind":
            return replace(cfg, attack=replace(cfg.attack or AttackSpec(), kind=_enum(AttackKind)(value, key)))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(key, str(exc)) from None
    raise ConfigError("sweep.parameter", f"unknown parameter {name!r}; expected one of {', '.join(SWEEP_PARAMS)}")


def build_trial_config(data: dict) -> TrialConfig:
    power = {"sigma2_l": parse_power, "sigma2_t": parse_power, "sigma2_e": parse_power}
    gammas = {"gamma_on": _complex, "gamma_off": _complex}
    kwargs = {
        "geometry": _build(ScenarioGeometry, "geometry", data.get("geometry")),
        "rician": _build(RicianParams, "rician", data.get("rician")),
        "circuit": _build(CircuitParams, "circuit", data.get("circuit"), gammas),
        "noise": _build(NoiseParams, "noise", data.get("noise"), power),
        "attack": _attack(data.get("attack", {})),
    }
    if "p_s" in data:
        kwargs["p_s"] = parse_power(data["p_s"], "p_s")
    if data.get("ris_mode") is not None:
        kwargs["ris_mode"] = _enum(RisMode)(data["ris_mode"], "ris_mode")
    for k in ("n_trials", "master_seed", "n_pilots", "channel_drift", "drift_rho"):
        if k in data:
            kwargs[k] = data[k]
    try:
        return TrialConfig(**kwargs)
    except ValueError as exc:
        word = re.match(r"(\w+)", str(exc))
        raise ConfigError(word.group(1) if word else "config", str(exc)) from None


def spec_from_dict(data: dict, default_name: str = "experiment") -> ExperimentSpec:
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be an object")
    unknown = sorted(set(data) - TOP_KEYS)
    if unknown:
        raise ConfigError(unknown[0], "unknown key")
    base = build_trial_config(data)

    sweep = None
    if data.get("sweep") is not None:
        s = data["sweep"]
        if not isinstance(s, dict) or set(s) != {"parameter", "values"}:
            raise ConfigError("sweep", "expected {'parameter': ..., 'values': [...]}")
        if s["parameter"] not in SWEEP_PARAMS:
            raise ConfigError("sweep.parameter", f"unknown parameter {s['parameter']!r}")
        if not isinstance(s["values"], list) or not s["values"]:
            raise ConfigError("sweep.values", "sweep values must be a nonempty list")
        for v in s["values"]:
            apply_param(base, s["parameter"], v)
        sweep = (s["parameter"], tuple(s["values"]))

    series = []
    for i, item in enumerate(data.get("series") or []):
        if not isinstance(item, dict) or set(item) - {"label", "overrides"} or "label" not in item:
            raise ConfigError(f"series[{i}]", "expected {'label': ..., 'overrides': {...}}")
        overrides = item.get("overrides", {})
        cfg = base
        for k, v in overrides.items():
            cfg = apply_param(cfg, k, v)
        series.append(Series(str(item["label"]), dict(overrides)))

    formats = data.get("formats", list(FORMATS))
    if isinstance(formats, str):
        formats = [formats]
    return ExperimentSpec(
        name=str(data.get("name", default_name)),
        base=base,
        sweep=sweep,
        series=tuple(series),
        output_dir=Path(data.get("output_dir", "results")),
        formats=tuple(formats),
    )


def parse_config(path) -> ExperimentSpec:
    path = Path(path)
    if not path.is_file():
        raise ConfigError("path", f"config file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("syntax", f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return spec_from_dict(data, default_name=path.stem)


def _plain(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if hasattr(value, "value") and not isinstance(value, (int, float, str)):
        return value.value
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def trial_config_dict(cfg: TrialConfig) -> dict:
    """Fully resolved configuration as JSON-ready data (powers in watts)."""
    out = {
        "geometry": asdict(cfg.geometry),
        "rician": asdict(cfg.rician),
        "circuit": asdict(cfg.circuit),
        "noise": asdict(cfg.noise),
        "p_s": cfg.p_s,
        "ris_mode": cfg.ris_mode,
        "attack": None if cfg.attack is None else asdict(cfg.attack),
        "n_trials": cfg.n_trials,
        "master_seed": cfg.master_seed,
        "n_pilots": cfg.n_pilots,
        "channel_drift": cfg.channel_drift,
        "drift_rho": cfg.drift_rho,
    }
    return _plain(out)
