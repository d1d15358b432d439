"""Unit conversions and closed-form radio formulas.

Powers are carried in dBm and gains in dB throughout the package; linear
quantities only appear inside computations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact SI value


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a formula."""


@dataclass(frozen=True)
class NoiseModel:
    """Receiver noise: thermal density (dBm/Hz) plus noise figure (dB)."""

    density: float = -174.0
    noise_figure: float = 5.0

    def __post_init__(self):
        if not math.isfinite(self.density):
            raise DomainError(f"noise density must be finite, got {self.density}")
        if not (self.noise_figure >= 0.0 and math.isfinite(self.noise_figure)):
            raise DomainError(f"noise figure must be >= 0 dB, got {self.noise_figure}")


def _check_positive(name, value):
    if not (value > 0.0 and math.isfinite(value)):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")


def wavelength(frequency: float) -> float:
    """Free-space wavelength in meters for a frequency in Hz."""
    _check_positive("frequency", frequency)
    return SPEED_OF_LIGHT / frequency


def wavenumber(frequency: float) -> float:
    return 2.0 * math.pi / wavelength(frequency)


def db_from_linear(x: float) -> float:
    if not x > 0.0:
        raise DomainError(f"cannot take dB of non-positive value {x!r}")
    return 10.0 * math.log10(x)


def linear_from_db(d: float) -> float:
    return 10.0 ** (d / 10.0)


def noise_power(noise: NoiseModel, bandwidth: float) -> float:
    """Integrated noise power in dBm over ``bandwidth`` Hz."""
    _check_positive("bandwidth", bandwidth)
    return noise.density + noise.noise_figure + 10.0 * math.log10(bandwidth)


def snr(received: float, noise: float) -> float:
    """Signal-to-noise ratio in dB from two dBm levels."""
    return received - noise


def shannon_capacity(bandwidth: float, snr_db: float) -> float:
    """Shannon-Hartley capacity in bit/s."""
    _check_positive("bandwidth", bandwidth)
    return bandwidth * math.log2(1.0 + linear_from_db(snr_db))
