"""Bi-static link budget through a reflective RIS and inverse panel sizing.

The panel is treated as a scatterer with radar cross-section

    sigma = (4 pi A^2 / lambda^2) * eta**efficiency_exponent * cos(theta)**cos_exponent

and the received power follows the bi-static radar equation with separate
BS->RIS (d1) and RIS->terminal (d2) spreading losses.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

from . import aperture
from .units import DomainError, NoiseModel, noise_power, shannon_capacity, snr, wavelength

BANDWIDTH_METHODS = ("numeric", "analytic", "reference")


@dataclass(frozen=True)
class ScenarioSpec:
    frequency: float
    d1: float
    d2: float
    theta_max: float
    total_antenna_gain: float = 56.0
    radiated_power: float = 20.0
    noise: NoiseModel = field(default_factory=NoiseModel)
    target_received_power: float = -59.0
    reference_bandwidth: float = 10e9
    phase_bits: int = 2
    switches_per_bit: int = 2
    aperture_efficiency: float = 0.25
    # RCS model knobs; defaults reproduce the published panel sizes
    cos_exponent: float = 1.0
    efficiency_exponent: float = 1.0
    squint_beta: float = aperture.DEFAULT_SQUINT_BETA

    def __post_init__(self):
        for name in ("frequency", "d1", "d2", "reference_bandwidth"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise DomainError(f"{name} must be positive, got {value!r}")
        if not 0.0 < self.aperture_efficiency <= 1.0:
            raise DomainError(f"aperture_efficiency must be in (0, 1], got {self.aperture_efficiency}")
        if not 0.0 < self.theta_max < 90.0:
            raise DomainError(f"theta_max must be in (0, 90) deg, got {self.theta_max}")
        if self.phase_bits < 1 or self.switches_per_bit < 1:
            raise DomainError("phase_bits and switches_per_bit must be >= 1")
        for name in ("total_antenna_gain", "radiated_power", "target_received_power"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    @classmethod
    def symmetric(cls, frequency, total_range, theta_max, **kwargs) -> "ScenarioSpec":
        """Scenario with the RIS halfway along ``total_range`` (d1 = d2)."""
        return cls(frequency=frequency, d1=total_range / 2.0, d2=total_range / 2.0,
                   theta_max=theta_max, **kwargs)

    @property
    def wavelength(self) -> float:
        return wavelength(self.frequency)


@dataclass(frozen=True)
class RisRequirementsReport:
    panel_side: float  # m
    cells_per_side: int
    switch_count: int
    max_bandwidth_3db: float  # Hz
    snr: float  # dB
    capacity: float  # bit/s
    bandwidth_method: str
    scenario: Optional[ScenarioSpec] = None


def _rcs_factor(eta, theta_deg, cos_exponent, efficiency_exponent):
    return eta ** efficiency_exponent * math.cos(math.radians(theta_deg)) ** cos_exponent


def ris_rcs(panel_area, lam, eta=0.25, theta_deg=0.0, cos_exponent=1.0, efficiency_exponent=1.0) -> float:
    """Radar cross-section in m^2 of a panel of ``panel_area`` m^2 steering to ``theta_deg``."""
    if not (panel_area > 0.0 and lam > 0.0):
        raise DomainError("panel area and wavelength must be positive")
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"efficiency must be in (0, 1], got {eta}")
    if not 0.0 <= theta_deg < 90.0:
        raise DomainError(f"theta must be in [0, 90) deg, got {theta_deg}")
    return 4.0 * math.pi * panel_area ** 2 / lam ** 2 * _rcs_factor(
        eta, theta_deg, cos_exponent, efficiency_exponent)


def _budget_constant(s: ScenarioSpec) -> float:
    """Every term of the radar equation except 10 log10(sigma), in dB."""
    return (s.radiated_power + s.total_antenna_gain + 20.0 * math.log10(s.wavelength)
            - 30.0 * math.log10(4.0 * math.pi) - 20.0 * math.log10(s.d1) - 20.0 * math.log10(s.d2))


def received_power(s: ScenarioSpec, sigma: float) -> float:
    """Received power in dBm for a scatterer of RCS ``sigma`` m^2."""
    if not sigma > 0.0:
        raise DomainError(f"RCS must be positive, got {sigma}")
    return _budget_constant(s) + 10.0 * math.log10(sigma)


def required_rcs(s: ScenarioSpec) -> float:
    """RCS in m^2 needed to hit the target received power."""
    sigma_db = s.target_received_power - _budget_constant(s)
    if sigma_db > 3000.0:
        raise OverflowError(f"required RCS of {sigma_db:.1f} dBsm is not representable")
    return 10.0 ** (sigma_db / 10.0)


def required_panel_side(s: ScenarioSpec) -> float:
    """Side in meters of the square panel meeting the target at the worst steering angle."""
    sigma = required_rcs(s)
    factor = _rcs_factor(s.aperture_efficiency, s.theta_max, s.cos_exponent, s.efficiency_exponent)
    side = (sigma * s.wavelength ** 2 / (4.0 * math.pi * factor)) ** 0.25
    if not (side > 0.0 and math.isfinite(side)):
        raise OverflowError(f"panel side not representable (sigma={sigma!r})")
    return side


def switch_count(cells_per_side: int, bits: int, switches_per_bit: int) -> int:
    for name, v in (("cells_per_side", cells_per_side), ("bits", bits), ("switches_per_bit", switches_per_bit)):
        if v < 1:
            raise DomainError(f"{name} must be >= 1, got {v}")
    return cells_per_side ** 2 * bits * switches_per_bit


def squint_target(s: ScenarioSpec) -> aperture.SteeringTarget:
    """Worst-case steering of a scenario: normal incidence reflected to ``theta_max``."""
    return aperture.SteeringTarget.normal_to(s.theta_max)


def size_panel(s: ScenarioSpec):
    """Geometry-only part of the evaluation: ``(panel_side, design, switch_count)``."""
    side = required_panel_side(s)
    design = aperture.build_grid(side, s.frequency, s.phase_bits)
    return side, design, switch_count(design.cells_per_side, s.phase_bits, s.switches_per_bit)


def evaluate_scenario(s: ScenarioSpec, bandwidth_method: str = "numeric") -> RisRequirementsReport:
    """Panel size, cell and switch counts, squint-limited bandwidth, SNR and capacity.

    ``bandwidth_method`` picks the squint model ("numeric" direct summation
    or the "analytic" closed form); "reference" skips squint and uses the
    scenario's reference bandwidth.
    """
    if bandwidth_method not in BANDWIDTH_METHODS:
        raise ValueError(f"bandwidth_method must be one of {BANDWIDTH_METHODS}, got {bandwidth_method!r}")
    side, design, switches = size_panel(s)
    if bandwidth_method == "numeric":
        bandwidth = aperture.squint_bandwidth_numeric(design, squint_target(s))
    elif bandwidth_method == "analytic":
        bandwidth = aperture.squint_bandwidth_analytic(side, s.theta_max, s.frequency, s.squint_beta)
    else:
        bandwidth = s.reference_bandwidth
    snr_db = snr(s.target_received_power, noise_power(s.noise, bandwidth))
    return RisRequirementsReport(
        panel_side=side,
        cells_per_side=design.cells_per_side,
        switch_count=switches,
        max_bandwidth_3db=bandwidth,
        snr=snr_db,
        capacity=shannon_capacity(bandwidth, snr_db),
        bandwidth_method=bandwidth_method,
        scenario=s,
    )


def _fmt(x):
    return float(f"{x:.9g}")


def scenario_to_flat(s: ScenarioSpec) -> dict:
    return {
        "frequency_ghz": _fmt(s.frequency / 1e9),
        "d1_m": _fmt(s.d1),
        "d2_m": _fmt(s.d2),
        "theta_max_deg": _fmt(s.theta_max),
        "total_antenna_gain_dbi": _fmt(s.total_antenna_gain),
        "radiated_power_dbm": _fmt(s.radiated_power),
        "noise_density_dbm_per_hz": _fmt(s.noise.density),
        "noise_figure_db": _fmt(s.noise.noise_figure),
        "target_received_power_dbm": _fmt(s.target_received_power),
        "reference_bandwidth_ghz": _fmt(s.reference_bandwidth / 1e9),
        "phase_bits": s.phase_bits,
        "switches_per_bit": s.switches_per_bit,
        "aperture_efficiency": _fmt(s.aperture_efficiency),
    }


def report_to_dict(report: RisRequirementsReport) -> dict:
    """Flat JSON-ready mapping with units in the key names and 9 significant digits."""
    out = {
        "panel_side_mm": _fmt(report.panel_side * 1e3),
        "cells_per_side": report.cells_per_side,
        "switch_count": report.switch_count,
        "max_bandwidth_3db_ghz": _fmt(report.max_bandwidth_3db / 1e9),
        "snr_db": _fmt(report.snr),
        "capacity_gbps": _fmt(report.capacity / 1e9),
        "bandwidth_method": report.bandwidth_method,
    }
    if report.scenario is not None:
        out.update(scenario_to_flat(report.scenario))
    return out


def scenario_fields(s: ScenarioSpec) -> dict:
    """Nested SI-unit mapping of a scenario, the inverse of the config loader."""
    d = asdict(s)
    d["noise"] = {"density": s.noise.density, "noise_figure": s.noise.noise_figure}
    return d
