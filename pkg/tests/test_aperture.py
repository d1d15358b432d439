import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rislink import aperture as ap
from rislink.units import SPEED_OF_LIGHT, DomainError, wavelength

F140 = 140e9


def brute_force_amplitude(design, phases, f, incident, theta_deg, phi_deg=0.0):
    """Per-cell loop over explicit 3-D geometry; independent of the vectorized path."""
    k = 2 * math.pi * f / SPEED_OF_LIGHT
    n, d = design.cells_per_side, design.cell_spacing
    t, p = math.radians(theta_deg), math.radians(phi_deg)
    obs = (math.sin(t) * math.cos(p), math.sin(t) * math.sin(p), math.cos(t))
    total = 0j
    for i in range(n):
        for j in range(n):
            r = ((i - (n - 1) / 2) * d, (j - (n - 1) / 2) * d, 0.0)
            if isinstance(incident, ap.PlaneWave):
                ti, pi_ = math.radians(incident.theta_deg), math.radians(incident.phi_deg)
                prop = (-math.sin(ti) * math.cos(pi_), -math.sin(ti) * math.sin(pi_), -math.cos(ti))
                inc_phase = -k * sum(a * b for a, b in zip(prop, r))
                cos_in = math.cos(ti)
            else:
                src = (incident.x, incident.y, incident.z)
                dist = math.dist(src, r)
                inc_phase = -k * (dist - math.dist(src, (0, 0, 0)))
                cos_in = incident.z / dist
            out_phase = k * sum(a * b for a, b in zip(obs, r))
            total += math.sqrt(cos_in) * np.exp(1j * (inc_phase + phases[i, j] + out_phase))
    return total * math.sqrt(max(math.cos(t), 0.0)) / n ** 2


# --- build_grid ---------------------------------------------------------------

@pytest.mark.parametrize("side, cells", [(24e-3, 22), (26e-3, 24), (1.0707e-3, 1)])
def test_build_grid(side, cells):
    design = ap.build_grid(side, F140)
    assert design.cells_per_side == cells
    assert design.cell_spacing == pytest.approx(wavelength(F140) / 2)
    assert design.side == pytest.approx(cells * design.cell_spacing)


def test_build_grid_rounds_ties_up():
    half = wavelength(F140) / 2
    assert ap.build_grid(2.5 * half, F140).cells_per_side == 3


def test_build_grid_rejects_sub_cell_panel():
    with pytest.raises(DomainError):
        ap.build_grid(0.3e-3, F140)
    with pytest.raises(DomainError):
        ap.build_grid(0.0, F140)


# --- profiles -----------------------------------------------------------------

def test_normal_to_normal_profile_is_constant():
    design = ap.ApertureDesign(F140, 8)
    prof = ap.synthesize_profile(design, ap.SteeringTarget.normal_to(0.0))
    assert np.ptp(prof.phases) == pytest.approx(0.0, abs=1e-12)


def test_tilt_profile_gradient():
    design = ap.ApertureDesign(30e9, 12)
    prof = ap.synthesize_profile(design, ap.SteeringTarget.normal_to(45.0))
    k0 = 2 * math.pi / wavelength(30e9)
    step = np.angle(np.exp(1j * np.diff(prof.phases, axis=0)))
    assert np.allclose(np.abs(step), k0 * math.sin(math.radians(45)) * design.cell_spacing)
    assert np.allclose(np.diff(prof.phases, axis=1), 0.0)


def test_point_source_profile_tends_to_plane_wave():
    design = ap.ApertureDesign(F140, 10)
    out = ap.PlaneWave(30.0, 0.0)
    plane = ap.synthesize_profile(design, ap.SteeringTarget(out))
    errs = []
    for z in (1.0, 10.0, 100.0, 1000.0):
        near = ap.synthesize_profile(design, ap.SteeringTarget(out, ap.PointSource(0.0, 0.0, z)))
        errs.append(np.max(np.abs(np.angle(np.exp(1j * (near.phases - plane.phases))))))
    assert errs == sorted(errs, reverse=True)
    assert errs[-1] < 1e-3


def test_invalid_targets():
    with pytest.raises(DomainError):
        ap.PlaneWave(90.0)
    with pytest.raises(DomainError):
        ap.PointSource(0.0, 0.0, -1.0)


# --- quantization -------------------------------------------------------------

def test_quantize_examples():
    one = ap.quantize_profile(ap.PhaseProfile(np.array([[0.3]])), 1)
    assert one.phases[0, 0] == 0.0
    tie = ap.quantize_profile(ap.PhaseProfile(np.array([[3 * math.pi / 4]])), 2)
    assert tie.phases[0, 0] == pytest.approx(math.pi / 2)
    wrap_tie = ap.quantize_profile(ap.PhaseProfile(np.array([[7 * math.pi / 4]])), 2)
    assert wrap_tie.phases[0, 0] == 0.0
    near_two_pi = ap.quantize_profile(ap.PhaseProfile(np.array([[2 * math.pi - 0.1]])), 3)
    assert near_two_pi.phases[0, 0] == 0.0


def test_quantize_rejects_bad_bits():
    p = ap.PhaseProfile(np.zeros((2, 2)))
    with pytest.raises(DomainError):
        ap.quantize_profile(p, 0)
    with pytest.raises(DomainError):
        ap.quantize_profile(ap.quantize_profile(p, 1), 2)


@settings(max_examples=50)
@given(st.integers(1, 5), st.integers(0, 2 ** 32 - 1))
def test_quantization_states_and_error_bound(bits, seed):
    phases = np.random.default_rng(seed).uniform(0, 2 * np.pi, size=(9, 9))
    q = ap.quantize_profile(ap.PhaseProfile(phases), bits)
    step = 2 * np.pi / 2 ** bits
    idx = q.phases / step
    assert np.allclose(idx, np.round(idx))
    assert set(np.round(idx).astype(int).ravel()) <= set(range(2 ** bits))
    err = np.abs(np.angle(np.exp(1j * (q.phases - phases))))
    assert np.all(err <= np.pi / 2 ** bits + 1e-12)


@pytest.mark.parametrize("bits, expected", [(1, 3.92), (2, 0.91), (None, 0.0)])
def test_quantization_loss(bits, expected):
    assert ap.quantization_loss(bits) == pytest.approx(expected, abs=0.005)


def test_quantization_loss_decreasing():
    losses = [ap.quantization_loss(b) for b in range(1, 12)]
    assert all(a > b for a, b in zip(losses, losses[1:]))
    assert losses[-1] < 1e-5
    with pytest.raises(DomainError):
        ap.quantization_loss(0)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 4), st.floats(0.0, 60.0), st.integers(0, 10_000))
def test_quantized_gain_never_exceeds_continuous(bits, theta, seed):
    design = ap.ApertureDesign(30e9, 10)
    target = ap.SteeringTarget.normal_to(theta)
    offset = np.random.default_rng(seed).uniform(0, 2 * np.pi)
    cont = ap.PhaseProfile(ap.synthesize_profile(design, target).phases + offset)
    # the continuous profile adds every cell in phase towards the target, so nothing can beat it there
    g_c = ap.gain_towards(design, cont, 30e9, target, theta)
    g_q = ap.gain_towards(design, ap.quantize_profile(cont, bits), 30e9, target, theta)
    assert g_q <= g_c + 1e-9


# --- radiation pattern ----------------------------------------------------------

@pytest.mark.parametrize("incident", [ap.PlaneWave(0.0), ap.PlaneWave(20.0, 30.0), ap.PointSource(0.01, -0.005, 0.03)])
def test_pattern_matches_brute_force(incident):
    design = ap.ApertureDesign(F140, 6)
    target = ap.SteeringTarget(ap.PlaneWave(35.0), incident)
    prof = ap.quantize_profile(ap.synthesize_profile(design, target), 2)
    thetas = [-60.0, -10.0, 0.0, 20.0, 35.0, 70.0]
    got = ap.array_response(design, prof, 1.03 * F140, target, thetas, phi_deg=15.0)
    for t, g in zip(thetas, got):
        ref = brute_force_amplitude(design, prof.phases, 1.03 * F140, incident, t, 15.0)
        assert g == pytest.approx(ref, abs=1e-12)


def test_uniform_profile_peaks_broadside_at_zero_db():
    design = ap.ApertureDesign(F140, 16)
    target = ap.SteeringTarget.normal_to(0.0)
    prof = ap.synthesize_profile(design, target)
    pat = ap.radiation_pattern(design, prof, F140, target, np.linspace(-80, 80, 161))
    assert ap.peak_direction(pat).theta_deg == pytest.approx(0.0, abs=1e-9)
    assert pat.gain_db.max() == pytest.approx(0.0, abs=1e-9)


def test_pattern_invariant_under_global_phase():
    design = ap.ApertureDesign(F140, 12)
    target = ap.SteeringTarget.normal_to(40.0)
    prof = ap.synthesize_profile(design, target)
    grid = np.linspace(-85, 85, 341)
    a = ap.radiation_pattern(design, prof, F140, target, grid).gain_db
    b = ap.radiation_pattern(design, ap.PhaseProfile(prof.phases + 1.234), F140, target, grid).gain_db
    assert np.allclose(a, b, atol=1e-9, rtol=0)


def test_pattern_partition_independent():
    design = ap.ApertureDesign(F140, 20, phase_bits=2)
    target = ap.SteeringTarget.normal_to(30.0)
    prof = ap.design_profile(design, target)
    grid = np.linspace(-89, 89, 1001)
    whole = ap.radiation_pattern(design, prof, F140, target, grid).gain_db
    parts = np.concatenate([ap.radiation_pattern(design, prof, F140, target, chunk).gain_db
                            for chunk in np.array_split(grid, 7)])
    assert np.array_equal(whole, parts)


def test_pattern_validation():
    design = ap.ApertureDesign(F140, 4)
    target = ap.SteeringTarget.normal_to(0.0)
    prof = ap.synthesize_profile(design, target)
    with pytest.raises(ValueError):
        ap.radiation_pattern(design, prof, F140, target, [])
    with pytest.raises(ValueError):
        ap.radiation_pattern(design, prof, F140, target, [10.0, 5.0])


def test_one_bit_mirror_lobe():
    design = ap.ApertureDesign(30e9, 30)
    target = ap.SteeringTarget.normal_to(45.0)
    base = ap.synthesize_profile(design, target)
    grid = np.linspace(-89.5, 89.5, 1791)
    mirror = (grid > -50) & (grid < -40)
    main = (grid > 40) & (grid < 50)
    one = ap.radiation_pattern(design, ap.quantize_profile(base, 1), 30e9, target, grid).gain_db
    cont = ap.radiation_pattern(design, base, 30e9, target, grid).gain_db
    assert one[mirror].max() == pytest.approx(one[main].max(), abs=0.5)
    assert cont[mirror].max() < cont[main].max() - 20.0


def test_pattern_csv(tmp_path):
    design = ap.ApertureDesign(F140, 4)
    target = ap.SteeringTarget.normal_to(10.0)
    pat = ap.radiation_pattern(design, ap.synthesize_profile(design, target), F140, target,
                               [-30.0, 0.0, 10.123456789])
    path = tmp_path / "p.csv"
    pat.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "theta_deg,gain_db"
    assert len(lines) == 4
    theta, gain = lines[3].split(",")
    assert float(theta) == 10.123456789
    assert float(gain) == pytest.approx(pat.gain_db[2], rel=1e-11)


# --- scan loss ------------------------------------------------------------------

@pytest.mark.parametrize("theta, expected", [(60.0, 3.01), (0.0, 0.0), (50.0, 1.92)])
def test_scan_loss(theta, expected):
    assert ap.scan_loss(theta) == pytest.approx(expected, abs=0.005)


def test_scan_loss_domain():
    with pytest.raises(DomainError):
        ap.scan_loss(90.0)


def test_steered_gain_follows_projection():
    design = ap.ApertureDesign(30e9, 30)
    grid = np.linspace(0, 89.5, 1791)
    broadside = ap.SteeringTarget.normal_to(0.0)
    steered = ap.SteeringTarget.normal_to(60.0)
    g0 = ap.radiation_pattern(design, ap.synthesize_profile(design, broadside), 30e9, broadside, grid).gain_db.max()
    g60 = ap.radiation_pattern(design, ap.synthesize_profile(design, steered), 30e9, steered, grid).gain_db.max()
    assert g0 - g60 == pytest.approx(3.0, abs=0.5)


# --- peak direction -------------------------------------------------------------

def test_peak_direction_delta():
    theta = np.arange(0.0, 90.0, 1.0)
    gain = np.full(theta.shape, -40.0)
    gain[45] = 0.0
    assert ap.peak_direction(ap.RadiationPattern(1e9, theta, gain)).theta_deg == pytest.approx(45.0)


def test_peak_direction_refines_between_samples():
    theta = np.arange(-10.0, 11.0, 1.0)
    gain = -(theta - 0.3) ** 2
    assert ap.peak_direction(ap.RadiationPattern(1e9, theta, gain)).theta_deg == pytest.approx(0.3)


def test_peak_direction_degenerate():
    pat = ap.RadiationPattern(1e9, np.array([1.0, 2.0, 3.0]), np.zeros(3))
    peak = ap.peak_direction(pat)
    assert peak.degenerate and peak.theta_deg == 1.0


def test_fig4_peak_at_design_and_squinted():
    design = ap.ApertureDesign(30e9, 30, phase_bits=1)
    target = ap.SteeringTarget.normal_to(45.0)
    prof = ap.design_profile(design, target)
    grid = np.arange(0.0, 90.0, 1.0)
    at_f0 = ap.peak_direction(ap.radiation_pattern(design, prof, 30e9, target, grid)).theta_deg
    assert at_f0 == pytest.approx(45.0, abs=0.5)
    f = 0.95 * 30e9
    low = ap.peak_direction(ap.radiation_pattern(design, prof, f, target, grid)).theta_deg
    expected = math.degrees(math.asin(math.sin(math.radians(45)) / 0.95))
    half_beamwidth = math.degrees(0.886 * wavelength(f) / (design.side * math.cos(math.radians(expected)))) / 2
    assert low == pytest.approx(expected, abs=half_beamwidth)
    assert low > at_f0


@pytest.mark.parametrize("ratio", [0.9, 0.93, 0.97, 1.0, 1.04, 1.07, 1.1])
def test_squint_law(ratio):
    design = ap.ApertureDesign(30e9, 30)
    target = ap.SteeringTarget.normal_to(45.0)
    prof = ap.synthesize_profile(design, target)
    f = ratio * 30e9
    peak = ap.peak_direction(ap.radiation_pattern(design, prof, f, target, np.linspace(0, 89.9, 900)))
    # half the null-to-null beamwidth in sin(theta) space is lambda/D
    assert abs(math.sin(math.radians(peak.theta_deg)) - math.sin(math.radians(45)) / ratio) \
        <= wavelength(f) / design.side


# --- squint bandwidth ---------------------------------------------------------

def test_numeric_squint_outdoor_50():
    design = ap.build_grid(0.118, F140, 2)
    bw = ap.squint_bandwidth_numeric(design, ap.SteeringTarget.normal_to(50.0))
    assert bw == pytest.approx(2.4e9, rel=0.25)


def test_numeric_squint_indoor_50():
    design = ap.build_grid(0.024, F140, 2)
    bw = ap.squint_bandwidth_numeric(design, ap.SteeringTarget.normal_to(50.0))
    assert bw == pytest.approx(12e9, rel=0.25)


def test_numeric_squint_matches_sinc_oracle():
    # continuous linear aperture: 3 dB where |sinc(x)|^2 = 1/2, x = dk*sin(theta)*D/2 = 1.39156
    design = ap.ApertureDesign(F140, 80)
    theta = 40.0
    bw = ap.squint_bandwidth_numeric(design, ap.SteeringTarget.normal_to(theta))
    half = 1.3915573 * SPEED_OF_LIGHT / (math.pi * design.side * math.sin(math.radians(theta)))
    assert bw == pytest.approx(2 * half, rel=0.01)


def test_numeric_squint_halves_when_side_doubles():
    target = ap.SteeringTarget.normal_to(50.0)
    small = ap.squint_bandwidth_numeric(ap.ApertureDesign(F140, 40, phase_bits=2), target)
    large = ap.squint_bandwidth_numeric(ap.ApertureDesign(F140, 80, phase_bits=2), target)
    assert large == pytest.approx(small / 2, rel=0.02)


def test_numeric_squint_product_constant():
    target = ap.SteeringTarget.normal_to(50.0)
    products = [ap.squint_bandwidth_numeric(ap.build_grid(s, F140, 2), target) * s for s in (0.024, 0.05, 0.118)]
    assert max(products) / min(products) - 1 < 0.05


def test_numeric_squint_broadside_unbounded():
    design = ap.ApertureDesign(F140, 20)
    assert ap.squint_bandwidth_numeric(design, ap.SteeringTarget.normal_to(0.0)) == math.inf


def test_numeric_squint_reports_search_limit():
    design = ap.ApertureDesign(F140, 3)
    with pytest.raises(ap.SquintSearchError, match="search limit"):
        ap.squint_bandwidth_numeric(design, ap.SteeringTarget.normal_to(10.0), bracket=0.05)


@pytest.mark.parametrize("side, theta, expected", [
    (0.118, 50.0, 2.41e9),
    (0.024, 50.0, 11.85e9),
    (0.125, 60.0, 1.57e9),
])
def test_analytic_squint(side, theta, expected):
    assert ap.squint_bandwidth_analytic(side, theta, F140) == pytest.approx(expected, rel=0.005)


def test_analytic_squint_domain():
    for theta in (0.0, 90.0, -5.0):
        with pytest.raises(DomainError):
            ap.squint_bandwidth_analytic(0.1, theta, F140)


def test_analytic_beta_fits_published_bandwidths():
    # least-squares refit of beta (relative residuals) on the four published (side, theta, bandwidth) entries
    entries = [(0.118, 50, 2.4e9), (0.125, 60, 1.5e9), (0.024, 50, 12e9), (0.026, 60, 7.8e9)]
    x = np.array([SPEED_OF_LIGHT / (s * math.tan(math.radians(t))) for s, t, _ in entries])
    y = np.array([b for *_, b in entries])
    ratio = x / y
    beta = float(ratio.sum() / (ratio @ ratio))
    assert beta == pytest.approx(ap.DEFAULT_SQUINT_BETA, abs=0.01)
    assert np.max(np.abs(beta * x / y - 1)) <= 0.08
