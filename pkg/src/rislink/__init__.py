"""Hardware requirements and performance bounds for RIS-aided links."""

from .aperture import (
    ApertureDesign,
    PhaseProfile,
    PlaneWave,
    PointSource,
    RadiationPattern,
    SteeringTarget,
    build_grid,
    peak_direction,
    quantization_loss,
    quantize_profile,
    radiation_pattern,
    scan_loss,
    squint_bandwidth_analytic,
    squint_bandwidth_numeric,
    synthesize_profile,
)
from .link import RisRequirementsReport, ScenarioSpec, evaluate_scenario, required_panel_side
from .units import NoiseModel, noise_power, shannon_capacity, snr, wavelength

__version__ = "0.1.0"
