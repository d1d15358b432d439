"""Discrete RIS aperture model.

A square panel of ``N x N`` cells on a regular grid in the z = 0 plane,
centered on the origin, radiating into z > 0.  Each cell re-radiates the
incident field with a programmable phase.  Patterns come from a direct
coherent sum over cells (array-factor model, no mutual coupling, no
unit-cell dispersion).

Phase conventions: an incident field reaching cell ``r`` carries phase
``-k * path(r)``, and radiation towards unit direction ``u`` adds
``+k u.r``.  A plane-wave incidence is described by its *arrival*
direction (where the source sits); the outgoing beam by its propagation
direction.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Union

import numpy as np

from .units import SPEED_OF_LIGHT, DomainError, wavelength

# Fitted beamwidth constant of the analytic squint model, B = beta*c/(D tan(theta)).
DEFAULT_SQUINT_BETA = 1.13

_PATTERN_FLOOR_DB = -300.0
_ANGLE_CHUNK = 256


class SquintSearchError(RuntimeError):
    """The 3 dB point was not bracketed inside the frequency search window."""


@dataclass(frozen=True)
class PlaneWave:
    theta_deg: float
    phi_deg: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta_deg < 90.0:
            raise DomainError(f"plane-wave theta must be in [0, 90) deg, got {self.theta_deg}")

    def transverse(self):
        """(x, y) components of the unit direction vector."""
        t, p = math.radians(self.theta_deg), math.radians(self.phi_deg)
        return math.sin(t) * math.cos(p), math.sin(t) * math.sin(p)


@dataclass(frozen=True)
class PointSource:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not self.z > 0.0:
            raise DomainError(f"point source must sit in front of the panel (z > 0), got z={self.z}")


@dataclass(frozen=True)
class SteeringTarget:
    outgoing: PlaneWave
    incident: Union[PlaneWave, PointSource] = PlaneWave(0.0, 0.0)

    @classmethod
    def normal_to(cls, theta_deg: float, phi_deg: float = 0.0) -> "SteeringTarget":
        """Normal plane-wave incidence reflected towards (theta, phi)."""
        return cls(outgoing=PlaneWave(theta_deg, phi_deg))


@dataclass(frozen=True)
class ApertureDesign:
    design_frequency: float
    cells_per_side: int
    cell_spacing: Optional[float] = None
    phase_bits: Optional[int] = None  # None = continuous phase control

    def __post_init__(self):
        if not self.design_frequency > 0.0:
            raise DomainError(f"design frequency must be positive, got {self.design_frequency}")
        if int(self.cells_per_side) != self.cells_per_side or self.cells_per_side < 1:
            raise DomainError(f"cells_per_side must be a positive integer, got {self.cells_per_side}")
        if self.cell_spacing is None:
            object.__setattr__(self, "cell_spacing", wavelength(self.design_frequency) / 2.0)
        if not self.cell_spacing > 0.0:
            raise DomainError(f"cell spacing must be positive, got {self.cell_spacing}")
        if self.phase_bits is not None and self.phase_bits < 1:
            raise DomainError(f"phase_bits must be >= 1 or None, got {self.phase_bits}")

    @property
    def side(self) -> float:
        return self.cells_per_side * self.cell_spacing

    @property
    def cell_count(self) -> int:
        return self.cells_per_side ** 2

    def cell_centers(self):
        """Cell center coordinates ``(X, Y)`` as ``(N, N)`` arrays, indexed (row, col) = (x, y)."""
        n = self.cells_per_side
        axis = (np.arange(n) - (n - 1) / 2.0) * self.cell_spacing
        return np.meshgrid(axis, axis, indexing="ij")


@dataclass(frozen=True, eq=False)
class PhaseProfile:
    phases: np.ndarray  # radians in [0, 2*pi), shape (N, N)
    bits: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "phases", np.mod(np.asarray(self.phases, dtype=float), 2.0 * np.pi))

    def states(self) -> np.ndarray:
        """Allowed phase values for a quantized profile."""
        if self.bits is None:
            raise ValueError("continuous profile has no discrete state set")
        return 2.0 * np.pi * np.arange(2 ** self.bits) / 2 ** self.bits


@dataclass(frozen=True, eq=False)
class RadiationPattern:
    frequency: float
    theta_deg: np.ndarray
    gain_db: np.ndarray
    phi_deg: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_csv(self, path_or_file):
        """Write ``theta_deg,gain_db`` rows with 12 significant digits."""
        if hasattr(path_or_file, "write"):
            _write_pattern_rows(self, path_or_file)
        else:
            with open(path_or_file, "w", newline="") as fh:
                _write_pattern_rows(self, fh)


def _write_pattern_rows(pattern, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["theta_deg", "gain_db"])
    for t, g in zip(pattern.theta_deg, pattern.gain_db):
        writer.writerow([f"{t:.12g}", f"{g:.12g}"])


def build_grid(panel_side: float, frequency: float, phase_bits: Optional[int] = None) -> ApertureDesign:
    """Square panel with half-wavelength spacing; cell count rounded to nearest, ties up."""
    if not panel_side > 0.0:
        raise DomainError(f"panel side must be positive, got {panel_side}")
    spacing = wavelength(frequency) / 2.0
    n = math.floor(panel_side / spacing + 0.5)
    if n < 1:
        raise DomainError(
            f"panel side {panel_side * 1e3:.4g} mm is smaller than one cell ({spacing * 1e3:.4g} mm)")
    return ApertureDesign(frequency, n, spacing, phase_bits)


def _incident_phase(design, target, k):
    """Incident phase and incidence-angle cosine at every cell for wavenumber ``k``."""
    X, Y = design.cell_centers()
    inc = target.incident
    if isinstance(inc, PlaneWave):
        sx, sy = inc.transverse()
        cos_in = math.cos(math.radians(inc.theta_deg))
        return k * (sx * X + sy * Y), np.full(X.shape, cos_in)
    # spherical wave referenced to the panel center so a distant source tends to the plane-wave case
    dist = np.sqrt((X - inc.x) ** 2 + (Y - inc.y) ** 2 + inc.z ** 2)
    ref = math.sqrt(inc.x ** 2 + inc.y ** 2 + inc.z ** 2)
    return -k * (dist - ref), inc.z / dist


def synthesize_profile(design: ApertureDesign, target: SteeringTarget) -> PhaseProfile:
    """Continuous phase profile that cancels the incident phase and adds a tilt towards the target."""
    k0 = 2.0 * np.pi / wavelength(design.design_frequency)
    X, Y = design.cell_centers()
    incident, _ = _incident_phase(design, target, k0)
    ux, uy = target.outgoing.transverse()
    return PhaseProfile(-incident - k0 * (ux * X + uy * Y), bits=None)


def quantize_profile(profile: PhaseProfile, bits: int) -> PhaseProfile:
    """Snap every phase to the nearest of ``2**bits`` uniform states.

    Distances wrap around 2*pi; an exact tie goes to the smaller state index.
    """
    if int(bits) != bits or bits < 1:
        raise DomainError(f"bits must be an integer >= 1, got {bits}")
    if profile.bits is not None and profile.bits < bits:
        raise DomainError(f"cannot requantize a {profile.bits}-bit profile to {bits} bits")
    levels = 2 ** bits
    step = 2.0 * np.pi / levels
    q = profile.phases / step
    lower = np.floor(q)
    frac = q - lower
    tie = np.isclose(frac, 0.5, rtol=0.0, atol=1e-12)
    idx = np.where(frac > 0.5, lower + 1, lower).astype(np.int64)
    # a tie across the wrap (last state vs state 0) resolves to state 0
    idx = np.where(tie & (lower == levels - 1), 0, np.where(tie, lower, idx))
    idx = np.mod(idx, levels)
    return PhaseProfile(idx * step, bits=bits)


def array_response(design, profile, frequency, target, theta_deg, phi_deg=0.0):
    """Complex normalized far-field amplitude along a cut plane.

    The amplitude carries the sqrt(cos) projection factor of both the
    incidence and the observation angle, and is scaled so that a uniform
    profile under normal incidence peaks at 1 at broadside.
    """
    theta = np.radians(np.atleast_1d(np.asarray(theta_deg, dtype=float)))
    k = 2.0 * np.pi * frequency / SPEED_OF_LIGHT
    X, Y = design.cell_centers()
    incident, cos_in = _incident_phase(design, target, k)
    cell = (np.sqrt(cos_in) * np.exp(1j * (incident + profile.phases))).ravel()
    cp, sp = math.cos(math.radians(phi_deg)), math.sin(math.radians(phi_deg))
    proj = X.ravel() * cp + Y.ravel() * sp
    out = np.empty(theta.shape, dtype=complex)
    # chunked by angle; each angle is summed independently so any partition of the grid gives identical values
    for start in range(0, theta.size, _ANGLE_CHUNK):
        t = theta[start:start + _ANGLE_CHUNK]
        steer = np.exp(1j * k * np.outer(np.sin(t), proj))
        out[start:start + _ANGLE_CHUNK] = (steer * cell).sum(axis=1)
    obs = np.sqrt(np.clip(np.cos(theta), 0.0, None))
    return out * obs / design.cell_count


def _to_db(amplitude):
    power = np.abs(amplitude) ** 2
    with np.errstate(divide="ignore"):
        db = 10.0 * np.log10(power)
    return np.maximum(db, _PATTERN_FLOOR_DB)


def radiation_pattern(design, profile, frequency, target, theta_deg, phi_deg=0.0) -> RadiationPattern:
    """Sampled pattern in dB relative to the uniform broadside peak of the same aperture."""
    theta = np.asarray(theta_deg, dtype=float)
    if theta.ndim != 1 or theta.size == 0:
        raise ValueError("theta grid must be a nonempty 1-D sequence")
    if theta.size > 1 and np.any(np.diff(theta) <= 0):
        raise ValueError("theta grid must be strictly increasing")
    if not frequency > 0.0:
        raise DomainError(f"frequency must be positive, got {frequency}")
    amp = array_response(design, profile, frequency, target, theta, phi_deg)
    return RadiationPattern(frequency, theta.copy(), _to_db(amp), phi_deg)


def gain_towards(design, profile, frequency, target, theta_deg, phi_deg=0.0) -> float:
    """Normalized gain in dB in one direction."""
    return float(_to_db(array_response(design, profile, frequency, target, [theta_deg], phi_deg))[0])


def design_profile(design: ApertureDesign, target: SteeringTarget) -> PhaseProfile:
    """Profile as it would be programmed: synthesized, then quantized to the design's bit depth."""
    profile = synthesize_profile(design, target)
    if design.phase_bits is not None:
        profile = quantize_profile(profile, design.phase_bits)
    return profile


def scan_loss(theta_deg: float) -> float:
    """Projected-aperture loss in dB, -10 log10(cos theta)."""
    if not 0.0 <= theta_deg < 90.0:
        raise DomainError(f"scan angle must be in [0, 90) deg, got {theta_deg}")
    return -10.0 * math.log10(math.cos(math.radians(theta_deg)))


def quantization_loss(bits: Optional[int]) -> float:
    """Mean main-lobe loss in dB of uniform b-bit phase quantization; ``None`` means continuous."""
    if bits is None:
        return 0.0
    if int(bits) != bits or bits < 1:
        raise DomainError(f"bits must be an integer >= 1, got {bits}")
    x = math.pi / 2 ** bits
    return -20.0 * math.log10(math.sin(x) / x)


def quantization_loss_numeric(bits, cells_per_side=30, frequency=30e9, theta_deg=45.0,
                              trials=64, seed=0) -> float:
    """Directivity loss of quantization by direct summation.

    Compares the gain towards the steered direction with and without
    quantization, averaging the linear power ratio over random global
    phase offsets of the profile.
    """
    design = ApertureDesign(frequency, cells_per_side)
    target = SteeringTarget.normal_to(theta_deg)
    base = synthesize_profile(design, target)
    rng = np.random.default_rng(seed)
    ratios = []
    for offset in rng.uniform(0.0, 2.0 * np.pi, size=trials):
        cont = PhaseProfile(base.phases + offset)
        quant = quantize_profile(cont, bits)
        g_c = np.abs(array_response(design, cont, frequency, target, [theta_deg]))[0] ** 2
        g_q = np.abs(array_response(design, quant, frequency, target, [theta_deg]))[0] ** 2
        ratios.append(g_q / g_c)
    return -10.0 * math.log10(float(np.mean(ratios)))


class Peak(NamedTuple):
    theta_deg: float
    degenerate: bool = False


def peak_direction(pattern: RadiationPattern) -> Peak:
    """Angle of the pattern maximum, refined by a parabola through the three samples around it."""
    theta, gain = pattern.theta_deg, pattern.gain_db
    if theta.size == 0:
        raise ValueError("empty pattern")
    i = int(np.argmax(gain))
    if np.all(gain == gain[i]):
        return Peak(float(theta[i]), degenerate=True)
    if i == 0 or i == theta.size - 1:
        return Peak(float(theta[i]))
    a, b, _ = np.polyfit(theta[i - 1:i + 2], gain[i - 1:i + 2], 2)
    if a >= 0.0:
        return Peak(float(theta[i]))
    vertex = -b / (2.0 * a)
    return Peak(float(np.clip(vertex, theta[i - 1], theta[i + 1])))


def _is_static_broadside(target):
    inc = target.incident
    return (target.outgoing.theta_deg == 0.0 and isinstance(inc, PlaneWave)
            and inc.theta_deg == 0.0)


def squint_bandwidth_numeric(design: ApertureDesign, target: SteeringTarget, f0: Optional[float] = None,
                             resolution: float = 1e6, bracket: float = 0.5) -> float:
    """3 dB bandwidth, in Hz, of the gain towards the design direction with phases frozen at ``f0``.

    Marches outwards from ``f0`` until the gain towards the design
    direction has dropped 3 dB, then bisects each edge to ``resolution``.
    Returns ``math.inf`` for normal incidence reflected to broadside,
    where the response does not depend on frequency.
    """
    f0 = design.design_frequency if f0 is None else f0
    if not f0 > 0.0:
        raise DomainError(f"f0 must be positive, got {f0}")
    if _is_static_broadside(target):
        return math.inf
    if f0 != design.design_frequency:
        design = ApertureDesign(f0, design.cells_per_side, design.cell_spacing, design.phase_bits)
    profile = design_profile(design, target)
    theta, phi = target.outgoing.theta_deg, target.outgoing.phi_deg

    def drop(f):
        return ref - gain_towards(design, profile, f, target, theta, phi)

    ref = gain_towards(design, profile, f0, target, theta, phi)
    step = max(resolution, f0 * wavelength(f0) / (16.0 * design.side))
    edges = []
    for direction in (-1.0, 1.0):
        limit = f0 * (1.0 + direction * bracket)
        inside, f = f0, f0
        while True:
            f = f + direction * step
            if direction * (f - limit) > 0.0:
                raise SquintSearchError(
                    f"3 dB point not found within +/-{bracket:.0%} of f0 "
                    f"(search limit {limit / 1e9:.6g} GHz)")
            if drop(f) >= 3.0:
                break
            inside = f
        outside = f
        while abs(outside - inside) > resolution:
            mid = 0.5 * (inside + outside)
            if drop(mid) >= 3.0:
                outside = mid
            else:
                inside = mid
        edges.append(0.5 * (inside + outside))
    return edges[1] - edges[0]


def squint_bandwidth_analytic(panel_side: float, theta_deg: float, f0: float,
                              beta: float = DEFAULT_SQUINT_BETA) -> float:
    """Closed-form squint bandwidth ``beta * c / (D tan(theta))`` in Hz.

    ``f0`` only enters through the domain check; the product B*D is
    frequency independent in this model.
    """
    if not 0.0 < theta_deg < 90.0:
        raise DomainError(f"steering angle must be in (0, 90) deg, got {theta_deg}")
    if not panel_side > 0.0 or not f0 > 0.0:
        raise DomainError("panel side and f0 must be positive")
    return beta * SPEED_OF_LIGHT / (panel_side * math.tan(math.radians(theta_deg)))
