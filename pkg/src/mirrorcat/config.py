"""Flat ``key = value`` run configuration.

The format is deliberately minimal: one setting per line, ``#`` starts a
comment, keys carry their SI unit as a suffix, and unknown keys are hard
errors.  ``freq_convention`` is mandatory and decides how the two mode
frequencies are interpreted: under "angular" a ``*_hz`` key is multiplied
by 2 pi before storage, under "plain" the quoted number is stored as the
rate directly.  ``*_rad_s`` keys are always stored literally.

A ``preset = <name>`` line expands to the named parameter regime (under
the configured convention); explicit keys then override individual
fields.  Every resolved setting, defaults included, is recorded in the
``echo`` mapping embedded in all reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import ExperimentParams, FREQ_CONVENTIONS
from .errors import ConfigError
from .presets import PRESET_NAMES, preset
from .rates import GridSpec, SWEEPABLE_FIELDS, decoherence_from_source
from .scheme import DECOHERENCE_SOURCES, DecoherenceInputs

__all__ = ["EnsembleSpec", "RunConfig", "parse_config", "preset_config_text"]

ORACLE_NBAR_CAP = 10.0

# param config key -> (field name, converts under angular)
_PARAM_KEYS = {
    "omega_0_hz": ("omega_0", True),
    "omega_0_rad_s": ("omega_0", False),
    "omega_m_hz": ("omega_m", True),
    "omega_m_rad_s": ("omega_m", False),
    "length_l_m": ("length_l", False),
    "mass_m_kg": ("mass_m", False),
    "gamma_a_per_s": ("gamma_a", False),
    "gamma_m_per_s": ("gamma_m", False),
    "theta_env_k": ("theta_env", False),
    "t_mirror_k": ("t_mirror", False),
    "n_fock": ("n_fock", False),
    "density_d_kg_m3": ("density_d", False),
}

_SCALAR_KEYS = {
    "freq_convention",
    "preset",
    "gamma_m_source",
    "gamma_m_rate_per_s",
    "times_s",
    "ensemble_scheme",
    "ensemble_size",
    "ensemble_seed",
    "oracle_dim",
    "output_format",
    "output_path",
    "scan_axes",
}

MANDATORY_KEYS = (
    "freq_convention",
    "omega_0_hz | omega_0_rad_s",
    "omega_m_hz | omega_m_rad_s",
    "length_l_m",
    "mass_m_kg",
    "gamma_a_per_s",
    "gamma_m_per_s",
    "theta_env_k",
    "t_mirror_k",
    "n_fock",
    "density_d_kg_m3",
)


@dataclass(frozen=True)
class EnsembleSpec:
    """Thermal-ensemble sampling settings for the oracle check."""

    scheme: str = "radial-quadrature"
    size: int = 16
    seed: int = 0

    def __post_init__(self):
        if self.scheme not in ("monte-carlo", "radial-quadrature"):
            raise ConfigError(f"unknown ensemble scheme {self.scheme!r}")
        if self.size < 1:
            raise ConfigError("ensemble_size must be >= 1")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved and validated run configuration."""

    params: ExperimentParams
    decoherence: DecoherenceInputs
    times: tuple[float, ...]
    ensemble: EnsembleSpec
    oracle_dim: int | None
    output_format: str
    output_path: str | None
    scan: GridSpec | None
    echo: dict

    def with_seed(self, seed: int) -> "RunConfig":
        ensemble = replace(self.ensemble, seed=int(seed))
        echo = dict(self.echo)
        echo["ensemble_seed"] = int(seed)
        return replace(self, ensemble=ensemble, echo=echo)


def preset_config_text(name: str, convention: str = "plain") -> str:
    """Minimal config text selecting a preset; used by the CLI's --preset."""
    return f"freq_convention = {convention}\npreset = {name}\n"


class _Entry:
    __slots__ = ("value", "line")

    def __init__(self, value: str, line: int):
        self.value = value
        self.line = line


def _tokenize(text: str) -> dict[str, _Entry]:
    entries: dict[str, _Entry] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in entries:
            raise ConfigError(
                f"line {lineno}: duplicate key {key!r} (first set on line {entries[key].line})"
            )
        entries[key] = _Entry(value, lineno)
    return entries


def _known_key(key: str) -> bool:
    if key in _SCALAR_KEYS or key in _PARAM_KEYS:
        return True
    if key.startswith("scan_values_") or key.startswith("scan_log_"):
        suffix = key.removeprefix("scan_values_").removeprefix("scan_log_")
        return suffix in _PARAM_KEYS
    return False


def _parse_float(entry: _Entry, key: str) -> float:
    try:
        value = float(entry.value)
    except ValueError:
        raise ConfigError(f"line {entry.line}: {key} must be a number, got {entry.value!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"line {entry.line}: {key} must be finite")
    return value


def _parse_int(entry: _Entry, key: str) -> int:
    try:
        value = int(entry.value)
    except ValueError:
        raise ConfigError(f"line {entry.line}: {key} must be an integer, got {entry.value!r}") from None
    return value


def _parse_float_list(entry: _Entry, key: str) -> tuple[float, ...]:
    parts = [part.strip() for part in entry.value.split(",")]
    if not parts or parts == [""]:
        raise ConfigError(f"line {entry.line}: {key} must be a comma-separated list of numbers")
    values = []
    for part in parts:
        try:
            values.append(float(part))
        except ValueError:
            raise ConfigError(
                f"line {entry.line}: {key} has a non-numeric item {part!r}"
            ) from None
    if not all(math.isfinite(v) for v in values):
        raise ConfigError(f"line {entry.line}: {key} must contain finite values")
    return tuple(values)


def _convert_param(key: str, value: float, convention: str) -> float:
    _, is_hz = _PARAM_KEYS[key]
    if is_hz and convention == "angular":
        return 2.0 * math.pi * value
    return value


def _resolve_params(entries: dict[str, _Entry], convention: str) -> ExperimentParams:
    field_values: dict[str, float] = {}
    field_lines: dict[str, tuple[str, int]] = {}
    for key, (field, _) in _PARAM_KEYS.items():
        if key not in entries:
            continue
        entry = entries[key]
        if field in field_lines:
            other_key, other_line = field_lines[field]
            raise ConfigError(
                f"line {entry.line}: {key} conflicts with {other_key} (line {other_line}); "
                "give each frequency in exactly one unit"
            )
        raw = _parse_int(entry, key) if field == "n_fock" else _parse_float(entry, key)
        field_values[field] = _convert_param(key, raw, convention)
        field_lines[field] = (key, entry.line)

    preset_entry = entries.get("preset")
    if preset_entry is not None:
        name = preset_entry.value
        if name not in PRESET_NAMES:
            raise ConfigError(
                f"line {preset_entry.line}: unknown preset {name!r}; "
                f"available: {', '.join(PRESET_NAMES)}"
            )
        base = preset(name, convention)
        try:
            return replace(base, **field_values)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    display = {
        "omega_0": "omega_0_hz | omega_0_rad_s",
        "omega_m": "omega_m_hz | omega_m_rad_s",
        "length_l": "length_l_m",
        "mass_m": "mass_m_kg",
        "gamma_a": "gamma_a_per_s",
        "gamma_m": "gamma_m_per_s",
        "theta_env": "theta_env_k",
        "t_mirror": "t_mirror_k",
        "n_fock": "n_fock",
        "density_d": "density_d_kg_m3",
    }
    missing = [display[f] for f in display if f not in field_values]
    if missing:
        raise ConfigError(
            "missing mandatory keys (or use 'preset = <name>'): " + ", ".join(missing)
        )
    try:
        return ExperimentParams(freq_convention=convention, **field_values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _resolve_times(entries: dict[str, _Entry], params: ExperimentParams) -> tuple[float, ...]:
    if "times_s" in entries:
        times = _parse_float_list(entries["times_s"], "times_s")
    else:
        period = params.period
        times = tuple(k * period / 8.0 for k in range(1, 9))
    if any(t < 0.0 for t in times):
        raise ConfigError("times_s must be non-negative")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ConfigError("times_s must be strictly increasing")
    return times


def _resolve_scan(entries: dict[str, _Entry], params: ExperimentParams, convention: str,
                  source: str, external_rate: float | None) -> GridSpec | None:
    axes_entry = entries.get("scan_axes")
    axis_keys = []
    if axes_entry is not None:
        axis_keys = [part.strip() for part in axes_entry.value.split(",") if part.strip()]
        if not axis_keys:
            raise ConfigError(f"line {axes_entry.line}: scan_axes is empty")
    used = set()
    axes = []
    for key in axis_keys:
        if key not in _PARAM_KEYS:
            raise ConfigError(
                f"line {axes_entry.line}: scan axis {key!r} is not a parameter key"
            )
        field = _PARAM_KEYS[key][0]
        values_key, log_key = f"scan_values_{key}", f"scan_log_{key}"
        if values_key in entries and log_key in entries:
            raise ConfigError(
                f"line {entries[log_key].line}: give {values_key} or {log_key}, not both"
            )
        if values_key in entries:
            values = _parse_float_list(entries[values_key], values_key)
            used.add(values_key)
        elif log_key in entries:
            spec = _parse_float_list(entries[log_key], log_key)
            if len(spec) != 3 or spec[2] < 2 or spec[2] != int(spec[2]):
                raise ConfigError(
                    f"line {entries[log_key].line}: {log_key} must be 'low, high, count>=2'"
                )
            if spec[0] <= 0.0 or spec[1] <= 0.0:
                raise ConfigError(f"line {entries[log_key].line}: log axis bounds must be positive")
            values = tuple(float(v) for v in np.geomspace(spec[0], spec[1], int(spec[2])))
            used.add(log_key)
        else:
            raise ConfigError(f"scan axis {key!r} has no scan_values_/scan_log_ entry")
        values = tuple(_convert_param(key, v, convention) for v in values)
        axes.append((field, values))
    for key in entries:
        if (key.startswith("scan_values_") or key.startswith("scan_log_")) and key not in used:
            raise ConfigError(
                f"line {entries[key].line}: {key} given but its axis is not listed in scan_axes"
            )
    if not axes:
        return None
    try:
        return GridSpec(
            base=params,
            axes=tuple(axes),
            gamma_m_source=source,
            external_rate=external_rate,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a flat-config document.

    Every error names the offending key and its line number; missing
    mandatory keys are listed together so one round trip fixes them all.
    """
    entries = _tokenize(text)
    for key, entry in entries.items():
        if not _known_key(key):
            raise ConfigError(f"line {entry.line}: unknown key {key!r}")

    if "freq_convention" not in entries:
        raise ConfigError(
            "missing mandatory keys: " + ", ".join(MANDATORY_KEYS)
            if not entries
            else "missing mandatory key freq_convention"
        )
    convention = entries["freq_convention"].value
    if convention not in FREQ_CONVENTIONS:
        raise ConfigError(
            f"line {entries['freq_convention'].line}: freq_convention must be one of "
            f"{', '.join(FREQ_CONVENTIONS)}"
        )

    params = _resolve_params(entries, convention)
    times = _resolve_times(entries, params)

    source = entries["gamma_m_source"].value if "gamma_m_source" in entries else "eid-model"
    if source not in DECOHERENCE_SOURCES:
        raise ConfigError(
            f"line {entries['gamma_m_source'].line}: gamma_m_source must be one of "
            f"{', '.join(DECOHERENCE_SOURCES)}"
        )
    external_rate = None
    if "gamma_m_rate_per_s" in entries:
        external_rate = _parse_float(entries["gamma_m_rate_per_s"], "gamma_m_rate_per_s")
    if source == "external" and external_rate is None:
        raise ConfigError("gamma_m_source = external requires gamma_m_rate_per_s")
    if source != "external" and external_rate is not None:
        raise ConfigError(
            f"line {entries['gamma_m_rate_per_s'].line}: gamma_m_rate_per_s is only "
            "meaningful with gamma_m_source = external"
        )
    try:
        decoherence = decoherence_from_source(params, source, external_rate)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    ensemble = EnsembleSpec(
        scheme=entries["ensemble_scheme"].value if "ensemble_scheme" in entries else "radial-quadrature",
        size=_parse_int(entries["ensemble_size"], "ensemble_size") if "ensemble_size" in entries else 16,
        seed=_parse_int(entries["ensemble_seed"], "ensemble_seed") if "ensemble_seed" in entries else 0,
    )

    oracle_dim = None
    if "oracle_dim" in entries:
        oracle_dim = _parse_int(entries["oracle_dim"], "oracle_dim")
        if oracle_dim < 2:
            raise ConfigError(f"line {entries['oracle_dim'].line}: oracle_dim must be >= 2")

    output_format = entries["output_format"].value if "output_format" in entries else "csv"
    if output_format not in ("csv", "json"):
        raise ConfigError(
            f"line {entries['output_format'].line}: output_format must be csv or json"
        )
    output_path = entries["output_path"].value if "output_path" in entries else None

    grid = _resolve_scan(entries, params, convention, source, external_rate)

    echo = {
        "freq_convention": convention,
        "preset": entries["preset"].value if "preset" in entries else "",
        "omega_0": params.omega_0,
        "omega_m": params.omega_m,
        "length_l_m": params.length_l,
        "mass_m_kg": params.mass_m,
        "gamma_a_per_s": params.gamma_a,
        "gamma_m_per_s": params.gamma_m,
        "theta_env_k": params.theta_env,
        "t_mirror_k": params.t_mirror,
        "n_fock": params.n_fock,
        "density_d_kg_m3": params.density_d,
        "gamma_m_source": decoherence.source,
        "gamma_m_rate_per_s": decoherence.gamma_m_rate,
        "times_s": list(times),
        "ensemble_scheme": ensemble.scheme,
        "ensemble_size": ensemble.size,
        "ensemble_seed": ensemble.seed,
        "oracle_dim": oracle_dim if oracle_dim is not None else "",
        "output_format": output_format,
    }

    return RunConfig(
        params=params,
        decoherence=decoherence,
        times=times,
        ensemble=ensemble,
        oracle_dim=oracle_dim,
        output_format=output_format,
        output_path=output_path,
        scan=grid,
        echo=echo,
    )
