"""Run configuration: versioned JSON documents and bundled presets.

Keys carry their units (``frequency_hz``, ``theta_max_deg``...).  Unknown
keys are rejected so that a typo never silently falls back to a default.
"""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .aperture import DEFAULT_SQUINT_BETA
from .link import ScenarioSpec
from .units import NoiseModel

SCHEMA_VERSION = "rislink.config/1"

SWEEP_PARAMETERS = (
    "panel_side_m", "theta_deg",  # squint sweeps
    "range_m", "aperture_efficiency", "target_received_power_dbm", "frequency_hz",  # report sweeps
)
PRESETS = ("outdoor", "indoor", "fig3_pattern", "fig4_pattern", "squint_side", "squint_theta")


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key path."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


_SCENARIO_DEFAULTS = {
    "frequency_hz": 140e9,
    "total_antenna_gain_dbi": 56.0,
    "radiated_power_dbm": 20.0,
    "noise_density_dbm_per_hz": -174.0,
    "noise_figure_db": 5.0,
    "target_received_power_dbm": -59.0,
    "reference_bandwidth_hz": 10e9,
    "phase_bits": 2,
    "switches_per_bit": 2,
    "aperture_efficiency": 0.25,
    "cos_exponent": 1.0,
    "efficiency_exponent": 1.0,
    "squint_beta": DEFAULT_SQUINT_BETA,
}
_SCENARIO_KEYS = set(_SCENARIO_DEFAULTS) | {"range_m", "d1_m", "d2_m", "theta_max_deg"}
_PATTERN_KEYS = {"design_frequency_hz", "panel_side_m", "cells_per_side", "incident", "outgoing",
                 "bits", "frequencies_hz", "theta_grid_deg", "cut_phi_deg"}
_SQUINT_KEYS = {"frequency_hz", "panel_side_m", "theta_deg", "phase_bits", "beta"}
_POWER_KEYS = {"switch_count", "on_fraction", "catalog"}
_TOP_KEYS = {"schema", "scenario", "bandwidth_method", "sweep", "pattern", "squint", "power", "output"}


@dataclass(frozen=True)
class Sweep:
    parameter: str
    start: float
    stop: float
    steps: int

    def values(self) -> list[float]:
        if self.steps == 1:
            return [self.start]
        h = (self.stop - self.start) / (self.steps - 1)
        return [self.start + i * h for i in range(self.steps)]


@dataclass
class RunConfig:
    raw: dict
    bandwidth_method: str = "numeric"
    sweep: Optional[Sweep] = None
    output_path: Optional[str] = None
    output_format: str = "json"
    theta_max_list: list = field(default_factory=list)

    def to_dict(self) -> dict:
        """Canonical document; parsing it again yields an equal config."""
        return copy.deepcopy(self.raw)

    def scenarios(self) -> list[ScenarioSpec]:
        """One scenario per entry of ``theta_max_deg`` (and per sweep value, if sweeping a scenario key)."""
        base = self.raw.get("scenario")
        if base is None:
            raise ConfigError("scenario", "section is required for this command")
        values = [None]
        if self.sweep is not None and self.sweep.parameter not in ("panel_side_m", "theta_deg"):
            values = self.sweep.values()
        out = []
        for v in values:
            sc = dict(base)
            if v is not None:
                if self.sweep.parameter == "range_m":
                    sc.pop("d1_m", None)
                    sc.pop("d2_m", None)
                sc[self.sweep.parameter] = v
            for theta in self.theta_max_list:
                out.append(_build_scenario(sc, theta))
        return out


def _require(section, key, where):
    if key not in section:
        raise ConfigError(f"{where}.{key}", "is required")
    return section[key]


def _number(value, where, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(where, f"expected a finite number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(where, f"must be positive, got {value!r}")
    return float(value)


def _check_keys(section, allowed, where):
    if not isinstance(section, dict):
        raise ConfigError(where, "expected an object")
    for key in section:
        if key not in allowed:
            raise ConfigError(f"{where}.{key}", "unknown key")


def _build_scenario(sc: dict, theta_max) -> ScenarioSpec:
    p = {**_SCENARIO_DEFAULTS, **sc}
    where = "scenario"
    if "range_m" in sc:
        if "d1_m" in sc or "d2_m" in sc:
            raise ConfigError(f"{where}.range_m", "give either range_m or d1_m/d2_m, not both")
        d1 = d2 = _number(sc["range_m"], f"{where}.range_m", positive=True) / 2.0
    else:
        d1 = _number(_require(sc, "d1_m", where), f"{where}.d1_m", positive=True)
        d2 = _number(_require(sc, "d2_m", where), f"{where}.d2_m", positive=True)
    theta = _number(theta_max, f"{where}.theta_max_deg")
    if not 0.0 < theta < 90.0:
        raise ConfigError(f"{where}.theta_max_deg", f"must lie in (0, 90) degrees, got {theta_max!r}")
    eta = _number(p["aperture_efficiency"], f"{where}.aperture_efficiency")
    if not 0.0 < eta <= 1.0:
        raise ConfigError(f"{where}.aperture_efficiency", f"must lie in (0, 1], got {eta!r}")
    nf = _number(p["noise_figure_db"], f"{where}.noise_figure_db")
    if nf < 0.0:
        raise ConfigError(f"{where}.noise_figure_db", f"must be >= 0, got {nf!r}")
    for key in ("phase_bits", "switches_per_bit"):
        if isinstance(p[key], bool) or not isinstance(p[key], int) or p[key] < 1:
            raise ConfigError(f"{where}.{key}", f"must be an integer >= 1, got {p[key]!r}")
    return ScenarioSpec(
        frequency=_number(p["frequency_hz"], f"{where}.frequency_hz", positive=True),
        d1=d1,
        d2=d2,
        theta_max=theta,
        total_antenna_gain=_number(p["total_antenna_gain_dbi"], f"{where}.total_antenna_gain_dbi"),
        radiated_power=_number(p["radiated_power_dbm"], f"{where}.radiated_power_dbm"),
        noise=NoiseModel(_number(p["noise_density_dbm_per_hz"], f"{where}.noise_density_dbm_per_hz"), nf),
        target_received_power=_number(p["target_received_power_dbm"], f"{where}.target_received_power_dbm"),
        reference_bandwidth=_number(p["reference_bandwidth_hz"], f"{where}.reference_bandwidth_hz",
                                    positive=True),
        phase_bits=p["phase_bits"],
        switches_per_bit=p["switches_per_bit"],
        aperture_efficiency=eta,
        cos_exponent=_number(p["cos_exponent"], f"{where}.cos_exponent"),
        efficiency_exponent=_number(p["efficiency_exponent"], f"{where}.efficiency_exponent"),
        squint_beta=_number(p["squint_beta"], f"{where}.squint_beta", positive=True),
    )


def parse_config(doc: dict) -> RunConfig:
    """Validate a config document and return a :class:`RunConfig`."""
    _check_keys(doc, _TOP_KEYS, "config")
    if doc.get("schema") != SCHEMA_VERSION:
        raise ConfigError("schema", f"expected {SCHEMA_VERSION!r}, got {doc.get('schema')!r}")

    method = doc.get("bandwidth_method", "numeric")
    if method not in ("numeric", "analytic"):
        raise ConfigError("bandwidth_method", f"must be 'numeric' or 'analytic', got {method!r}")

    theta_list = []
    if "scenario" in doc:
        sc = doc["scenario"]
        _check_keys(sc, _SCENARIO_KEYS, "scenario")
        thetas = _require(sc, "theta_max_deg", "scenario")
        theta_list = list(thetas) if isinstance(thetas, list) else [thetas]
        if not theta_list:
            raise ConfigError("scenario.theta_max_deg", "must not be empty")
        for t in theta_list:
            _build_scenario(sc, t)  # validates eagerly

    sweep = None
    if "sweep" in doc:
        s = doc["sweep"]
        _check_keys(s, {"parameter", "start", "stop", "steps"}, "sweep")
        name = _require(s, "parameter", "sweep")
        if name not in SWEEP_PARAMETERS:
            raise ConfigError("sweep.parameter", f"must be one of {SWEEP_PARAMETERS}, got {name!r}")
        steps = _require(s, "steps", "sweep")
        if isinstance(steps, bool) or not isinstance(steps, int) or steps < 2:
            raise ConfigError("sweep.steps", f"must be an integer >= 2, got {steps!r}")
        sweep = Sweep(name, _number(_require(s, "start", "sweep"), "sweep.start"),
                      _number(_require(s, "stop", "sweep"), "sweep.stop"), steps)

    if "pattern" in doc:
        _validate_pattern(doc["pattern"])
    if "squint" in doc:
        _check_keys(doc["squint"], _SQUINT_KEYS, "squint")
    if "power" in doc:
        _check_keys(doc["power"], _POWER_KEYS, "power")

    out = doc.get("output", {})
    _check_keys(out, {"path", "format"}, "output")
    fmt = out.get("format", "json")
    if fmt not in ("json", "csv"):
        raise ConfigError("output.format", f"must be 'json' or 'csv', got {fmt!r}")
    return RunConfig(raw=copy.deepcopy(doc), bandwidth_method=method, sweep=sweep,
                     output_path=out.get("path"), output_format=fmt, theta_max_list=theta_list)


def _validate_pattern(p):
    _check_keys(p, _PATTERN_KEYS, "pattern")
    _number(_require(p, "design_frequency_hz", "pattern"), "pattern.design_frequency_hz", positive=True)
    if ("panel_side_m" in p) == ("cells_per_side" in p):
        raise ConfigError("pattern.panel_side_m", "give exactly one of panel_side_m or cells_per_side")
    grid = _require(p, "theta_grid_deg", "pattern")
    _check_keys(grid, {"start", "stop", "steps"}, "pattern.theta_grid_deg")
    steps = _require(grid, "steps", "pattern.theta_grid_deg")
    if isinstance(steps, bool) or not isinstance(steps, int) or steps < 1:
        raise ConfigError("pattern.theta_grid_deg.steps", f"angle grid must be nonempty, got {steps!r}")
    bits = p.get("bits", ["continuous"])
    if not isinstance(bits, list) or not bits:
        raise ConfigError("pattern.bits", "must be a nonempty list")
    for b in bits:
        if b != "continuous" and (isinstance(b, bool) or not isinstance(b, int) or b < 1):
            raise ConfigError("pattern.bits", f"entries are integers >= 1 or 'continuous', got {b!r}")
    for f in p.get("frequencies_hz", []):
        _number(f, "pattern.frequencies_hz", positive=True)


def load_config(path_or_preset: str) -> RunConfig:
    """Parse a config file; ``preset:<name>`` loads a bundled preset."""
    if path_or_preset.startswith("preset:"):
        doc = load_preset_document(path_or_preset.split(":", 1)[1])
    else:
        try:
            with open(path_or_preset) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path_or_preset}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON: {exc}") from exc
    return parse_config(doc)


def load_preset_document(name: str) -> dict:
    if name not in PRESETS:
        raise ConfigError("config", f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    text = resources.files("rislink.presets").joinpath(f"{name}.json").read_text()
    return json.loads(text)
