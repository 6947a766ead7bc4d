"""Run configuration: flat dotted-key text files plus overrides.

All frequencies in config files are ordinary frequency (Hz); they are
converted to angular units where the physics modules need them.  The
channel defaults were fitted once against the reference fidelity/
visibility numbers and are not recomputed at runtime.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import ConfigError
from .eit import DECAY_SHAPES, EitMedium, MemoryDecay
from .qubit import MemoryChannelParams
from .spectral import (PUMP_KINDS, TWO_PI, CavityLine, FrequencyGrid,
                       PumpSpectrum, default_grid, sigma_from_pulse_duration)

_FORMATS = ("csv", "json", "svg")

# key -> (type tag, default).  Type tags: int, float, optfloat, str.
DEFAULTS = {
    "seed": ("int", 12345),
    "source.gamma_hz": ("float", 5e6),
    "source.pump_kind": ("str", "gaussian"),
    "source.T_p_s": ("optfloat", 30e-9),
    "source.sigma_hz": ("optfloat", None),
    "eit.od": ("float", 55.0),
    "eit.rabi_hz": ("float", 12.6e6),
    "eit.gamma_ge_hz": ("float", 2.87e6),
    "eit.gamma_s_hz": ("float", 1.0e4),
    "eit.length_m": ("float", 4e-3),
    "eit.eta0": ("float", 0.2),
    "eit.tau_mem_s": ("float", 1.494136040059602e-06),
    "eit.decay_shape": ("str", "gaussian"),
    "channel.eta_U": ("float", 0.5819439041677432),
    "channel.eta_D": ("float", 1.0),
    "channel.phase_jitter_rad": ("float", TWO_PI / 28.0),
    "channel.background_b": ("float", 0.059371996124696444),
    "channel.V_src": ("float", 0.9078388022982314),
    "g13.g0": ("float", 25.0),
    "grids.n_freq": ("int", 512),
    "grids.freq_span_factor": ("float", 40.0),
    "grids.n_time": ("int", 512),
    "grids.time_span_factor": ("float", 10.0),
    "output.directory": ("str", "out"),
    "output.formats": ("str", "csv,json,svg"),
}

_POSITIVE = (
    "source.gamma_hz", "eit.od", "eit.rabi_hz", "eit.gamma_ge_hz",
    "eit.length_m", "eit.eta0", "eit.tau_mem_s", "grids.freq_span_factor",
    "grids.time_span_factor",
)
_NON_NEGATIVE = ("eit.gamma_s_hz", "channel.phase_jitter_rad",
                 "channel.background_b")
_UNIT_RANGE = ("channel.eta_U", "channel.eta_D", "channel.V_src", "eit.eta0")


def _parse_value(key: str, text: str):
    kind = DEFAULTS[key][0]
    text = text.strip()
    if kind == "str":
        return text
    if kind == "optfloat" and text.lower() == "none":
        return None
    try:
        if kind == "int":
            return int(text)
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r} as {kind}") from None


@dataclass(frozen=True)
class RunConfig:
    values: dict

    def __getitem__(self, key: str):
        return self.values[key]

    def echo(self) -> dict:
        return dict(sorted(self.values.items()))

    def canonical_text(self) -> str:
        lines = [f"{k} = {v!r}" for k, v in sorted(self.values.items())]
        return "\n".join(lines) + "\n"


def _validate(values: dict) -> None:
    for key in _POSITIVE:
        if not values[key] > 0.0:
            raise ConfigError(f"{key} must be positive, got {values[key]!r}")
    for key in _NON_NEGATIVE:
        if values[key] < 0.0:
            raise ConfigError(f"{key} must be >= 0, got {values[key]!r}")
    for key in _UNIT_RANGE:
        if not 0.0 <= values[key] <= 1.0:
            raise ConfigError(f"{key} must be in [0, 1], got {values[key]!r}")
    for key in ("grids.n_freq", "grids.n_time"):
        if values[key] < 8:
            raise ConfigError(f"{key} must be at least 8")
    if values["source.pump_kind"] not in PUMP_KINDS:
        raise ConfigError(f"source.pump_kind must be one of {PUMP_KINDS}")
    if values["eit.decay_shape"] not in DECAY_SHAPES:
        raise ConfigError(f"eit.decay_shape must be one of {DECAY_SHAPES}")
    if not values["g13.g0"] > 1.0:
        raise ConfigError("g13.g0 must exceed 1")
    tp, sig = values["source.T_p_s"], values["source.sigma_hz"]
    if values["source.pump_kind"] == "gaussian":
        if (tp is None) == (sig is None):
            raise ConfigError(
                "exactly one of source.T_p_s and source.sigma_hz must be set")
        if tp is not None and not tp > 0.0:
            raise ConfigError("source.T_p_s must be positive")
        if sig is not None and not sig > 0.0:
            raise ConfigError("source.sigma_hz must be positive")
    fmts = _formats_list(values["output.formats"])
    for f in fmts:
        if f not in _FORMATS:
            raise ConfigError(f"unknown output format {f!r}; "
                              f"allowed: {_FORMATS}")
    if not fmts:
        raise ConfigError("output.formats must name at least one format")


def _formats_list(text: str) -> list:
    return [p.strip() for p in text.split(",") if p.strip()]


def _apply(values: dict, key: str, raw: str) -> None:
    key = key.strip()
    if key not in DEFAULTS:
        raise ConfigError(f"unknown config key {key!r}")
    values[key] = _parse_value(key, raw)


def load_config(path: str = None, overrides=()) -> RunConfig:
    """Defaults, then the file, then `--set key=value` overrides."""
    values = {k: v for k, (_, v) in DEFAULTS.items()}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        for ln, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{ln}: expected 'key = value'")
            key, raw = line.split("=", 1)
            _apply(values, key, raw)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set needs key=value, got {item!r}")
        key, raw = item.split("=", 1)
        _apply(values, key, raw)
    _validate(values)
    return RunConfig(values)


def seed_from(cfg: RunConfig) -> int:
    env = os.environ.get("QISIM_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"QISIM_SEED must be an integer, got {env!r}") \
                from None
    return cfg["seed"]


# ------------------------------------------------------- object builders

def line_from(cfg: RunConfig) -> CavityLine:
    return CavityLine(gamma=TWO_PI * cfg["source.gamma_hz"])


def pump_from(cfg: RunConfig, t_p_s: float = None,
              sigma_hz: float = None) -> PumpSpectrum:
    """Pump from config, optionally overriding the bandwidth knob."""
    kind = cfg["source.pump_kind"]
    if kind != "gaussian":
        return PumpSpectrum(kind=kind)
    if t_p_s is not None and sigma_hz is not None:
        raise ConfigError("give at most one of t_p_s, sigma_hz")
    if sigma_hz is not None:
        return PumpSpectrum(kind="gaussian", sigma=TWO_PI * sigma_hz)
    if t_p_s is None:
        t_p_s = cfg["source.T_p_s"]
    if t_p_s is not None:
        return PumpSpectrum(kind="gaussian",
                            sigma=sigma_from_pulse_duration(t_p_s))
    return PumpSpectrum(kind="gaussian",
                        sigma=TWO_PI * cfg["source.sigma_hz"])


def grid_from(cfg: RunConfig, line: CavityLine,
              pump: PumpSpectrum) -> FrequencyGrid:
    return default_grid(line, pump, n_points=cfg["grids.n_freq"],
                        span_factor=cfg["grids.freq_span_factor"])


def medium_from(cfg: RunConfig, gamma_s_hz: float = None) -> EitMedium:
    if gamma_s_hz is None:
        gamma_s_hz = cfg["eit.gamma_s_hz"]
    return EitMedium(
        optical_depth=cfg["eit.od"],
        rabi_control=TWO_PI * cfg["eit.rabi_hz"],
        gamma_ge=TWO_PI * cfg["eit.gamma_ge_hz"],
        gamma_s=TWO_PI * gamma_s_hz,
        length=cfg["eit.length_m"],
    )


def decay_from(cfg: RunConfig) -> MemoryDecay:
    return MemoryDecay(eta0=cfg["eit.eta0"], tau_mem=cfg["eit.tau_mem_s"],
                       shape=cfg["eit.decay_shape"])


def background_at(cfg: RunConfig, t_s: float) -> float:
    """Background-to-signal ratio grows as retrieval decays: the noise
    rate is constant while the signal follows eta(t)."""
    decay = decay_from(cfg)
    return cfg["channel.background_b"] * decay.eta(0.0) / decay.eta(t_s)


def channel_from(cfg: RunConfig, t_s: float,
                 balanced: bool = False) -> MemoryChannelParams:
    return MemoryChannelParams(
        eta_U=1.0 if balanced else cfg["channel.eta_U"],
        eta_D=1.0 if balanced else cfg["channel.eta_D"],
        phase_jitter_sigma=cfg["channel.phase_jitter_rad"],
        background=background_at(cfg, t_s),
        storage_time=t_s,
    )


def formats_from(cfg: RunConfig) -> tuple:
    return tuple(_formats_list(cfg["output.formats"]))
