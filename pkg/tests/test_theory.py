import math

import numpy as np
import pytest

from billiardavg.errors import ConfigurationError, ConvergenceError
from billiardavg.harness.experiments import ExperimentContext, resolve_config
from billiardavg.spectrum.shape import DEFAULT_ALPHA
from billiardavg.theory.modes import (
    POSumConfig,
    enumerate_modes,
    mode_weight,
    scaled_length,
    shortest_length,
)
from billiardavg.theory.orbits import (
    alpha_averaged_fluct,
    best_shift,
    perimeter_shift,
    sa_decay_threshold,
    staircase_fluct_amplitudes,
    theory_cfss,
    theory_sample_iv,
    theory_saturation_sr,
    theory_staircase_fluct,
)

# Fixed radii below ~10⁶ need a tail tolerance well above the default.
LOOSE = 0.1
FIXED = POSumConfig(r_max=100.0, tail_tol=LOOSE)


# ── Winding modes ──


def test_mode_weights():
    assert mode_weight(0, 0) == 0.0
    assert mode_weight(3, 0) == 0.5
    assert mode_weight(0, 2) == 0.5
    assert mode_weight(1, 4) == 1.0


def test_scaled_length_square():
    assert scaled_length(3, 4, 1.0) == pytest.approx(5.0)


def test_square_modes_up_to_diagonal():
    table = enumerate_modes(1.0, math.sqrt(2.0))
    assert len(table) == 3
    modes = {(int(a), int(b)): float(w) for a, b, w in zip(table.m1, table.m2, table.weight)}
    assert modes == {(1, 0): 0.5, (0, 1): 0.5, (1, 1): 1.0}


def test_mode_table_excludes_origin_and_respects_radius():
    table = enumerate_modes(DEFAULT_ALPHA, 40.0)
    assert np.all((table.m1 > 0) | (table.m2 > 0))
    assert table.length.max() <= 40.0
    np.testing.assert_allclose(table.length, scaled_length(table.m1, table.m2, DEFAULT_ALPHA))


def test_radius_below_shortest_orbit():
    with pytest.raises(ConfigurationError):
        enumerate_modes(DEFAULT_ALPHA, 0.5 * shortest_length(DEFAULT_ALPHA))


def test_po_sum_config_validation():
    with pytest.raises(ConfigurationError):
        POSumConfig(r_max=-1.0)
    with pytest.raises(ConfigurationError):
        POSumConfig(tail_tol=0.0)
    with pytest.raises(ConfigurationError):
        POSumConfig(sine_tol=-1e-4)


# ── σ_Θ, δ₃^∞, k_Θ ──


def test_iv_is_symmetric_under_side_swap():
    widths = np.linspace(0.0, 800.0, 33)
    a = theory_sample_iv(1e4, widths, 0.7, POSumConfig(r_max=50.0, tail_tol=LOOSE))
    b = theory_sample_iv(1e4, widths, 1.0 / 0.7, POSumConfig(r_max=50.0, tail_tol=LOOSE))
    np.testing.assert_allclose(a, b, rtol=1e-10)


def test_saturation_and_cfss_are_symmetric_under_side_swap():
    config = POSumConfig(r_max=50.0, tail_tol=LOOSE)
    widths = np.linspace(0.0, 500.0, 11)
    for alpha in (0.7, DEFAULT_ALPHA):
        sat = theory_saturation_sr(1e4, alpha, config)
        assert theory_saturation_sr(1e4, 1.0 / alpha, config) == pytest.approx(sat, rel=1e-12)
        np.testing.assert_allclose(
            theory_cfss(1e4, widths, 1.0 / alpha, config),
            theory_cfss(1e4, widths, alpha, config),
            rtol=1e-10,
        )
    adaptive = theory_saturation_sr(1e4, 0.7)
    assert theory_saturation_sr(1e4, 1 / 0.7) == pytest.approx(adaptive, rel=1e-10)


def test_iv_scale_invariance():
    widths = np.linspace(10.0, 500.0, 25)
    base = theory_sample_iv(1e4, widths, DEFAULT_ALPHA, FIXED)
    for c in (1.1, 1.7, 2.0):
        scaled = theory_sample_iv(c * 1e4, math.sqrt(c) * widths, DEFAULT_ALPHA, FIXED)
        np.testing.assert_allclose(scaled / math.sqrt(c), base, rtol=1e-11)


def test_iv_scalar_and_zero_width():
    value = theory_sample_iv(1e4, 0.0, DEFAULT_ALPHA, FIXED)
    assert isinstance(value, float)
    assert value == 0.0


def test_iv_rejects_bad_arguments():
    with pytest.raises(ValueError):
        theory_sample_iv(0.0, 1.0, DEFAULT_ALPHA)
    with pytest.raises(ValueError):
        theory_sample_iv(1e4, [-1.0], DEFAULT_ALPHA)


def test_iv_is_diagonal_sum_of_squared_amplitudes():
    config = POSumConfig(r_max=20.0, tail_tol=LOOSE, tail_correction=False)
    energy, width = 2.5e4, 123.0
    table = enumerate_modes(DEFAULT_ALPHA, 20.0)
    amp = staircase_fluct_amplitudes(energy, table)
    k = math.sqrt(math.pi / energy) * width
    expected = float(np.sum(2.0 * amp ** 2 * np.sin(k * table.length) ** 2))
    assert theory_sample_iv(energy, width, DEFAULT_ALPHA, config) == pytest.approx(expected, rel=1e-12)


def test_iv_mean_over_large_widths_is_twice_saturation():
    config = POSumConfig(r_max=200.0, tail_tol=LOOSE)
    widths = np.linspace(5e3, 1e4, 2001)
    iv = theory_sample_iv(1e4, widths, DEFAULT_ALPHA, config)
    sat = theory_saturation_sr(1e4, DEFAULT_ALPHA, config)
    assert iv.mean() == pytest.approx(2.0 * sat, rel=0.05)


def test_saturation_grows_like_root_energy():
    sat = theory_saturation_sr(np.array([1e4, 4e4]), DEFAULT_ALPHA, FIXED)
    assert sat[1] == pytest.approx(2.0 * sat[0], rel=1e-13)
    assert isinstance(theory_saturation_sr(1e4, DEFAULT_ALPHA, FIXED), float)


def test_cfss_at_zero_width_is_saturation():
    assert theory_cfss(1e4, 0.0, DEFAULT_ALPHA, FIXED) == pytest.approx(
        theory_saturation_sr(1e4, DEFAULT_ALPHA, FIXED)
    )


def test_cfss_relation():
    widths = np.array([50.0, 300.0])
    k = theory_cfss(1e4, widths, DEFAULT_ALPHA, FIXED)
    sat = theory_saturation_sr(1e4, DEFAULT_ALPHA, FIXED)
    iv = theory_sample_iv(1e4, widths, DEFAULT_ALPHA, FIXED)
    np.testing.assert_allclose(k, sat - 0.5 * iv, rtol=1e-13)


# ── Adaptive and fixed radius ──

LARGE = POSumConfig(r_max=1024.0, tail_tol=LOOSE)
LARGER = POSumConfig(r_max=2048.0, tail_tol=LOOSE)


def test_adaptive_saturation_matches_large_radius():
    adaptive = theory_saturation_sr(1e4, DEFAULT_ALPHA)
    assert adaptive == pytest.approx(theory_saturation_sr(1e4, DEFAULT_ALPHA, LARGE), rel=1e-4)


def test_adaptive_iv_matches_large_radius():
    widths = np.linspace(0.0, 200.0, 9)
    adaptive = theory_sample_iv(1e4, widths, DEFAULT_ALPHA)
    reference = theory_sample_iv(1e4, widths, DEFAULT_ALPHA, LARGE)
    scale = theory_saturation_sr(1e4, DEFAULT_ALPHA, LARGE)
    assert np.max(np.abs(adaptive - reference)) <= 2e-3 * scale


def test_doubling_the_radius_beyond_convergence_changes_little():
    sat = theory_saturation_sr(1e4, DEFAULT_ALPHA)
    assert theory_saturation_sr(1e4, DEFAULT_ALPHA, LARGER) == pytest.approx(sat, rel=1e-5)

    widths = np.linspace(0.0, 1000.0, 11)
    iv = theory_sample_iv(1e4, widths, DEFAULT_ALPHA)
    doubled = theory_sample_iv(1e4, widths, DEFAULT_ALPHA, LARGER)
    assert np.max(np.abs(iv - doubled)) <= 2e-3 * sat


def test_iv_reference_value_at_large_energy():
    energy, width = 1e5, 500.0
    value = theory_sample_iv(energy, width, DEFAULT_ALPHA)
    sat = theory_saturation_sr(energy, DEFAULT_ALPHA)
    # plain truncated sum, no continuum tail: misses ~π/(4R) of the sine-squared sum
    plain = theory_sample_iv(
        energy, width, DEFAULT_ALPHA,
        POSumConfig(r_max=2048.0, tail_tol=LOOSE, tail_correction=False),
    )
    tail = 4.0 * math.sqrt(energy / math.pi ** 5) * math.pi / (4.0 * 2048.0)
    assert abs(value - plain) <= 3.0 * tail
    reference = theory_sample_iv(energy, width, DEFAULT_ALPHA, LARGER)
    assert value == pytest.approx(reference, abs=2e-3 * sat)
    assert 0.0 < value < 4.0 * sat


def test_adaptive_radius_gives_up():
    config = POSumConfig(sine_tol=1e-15, r_cap=64.0)
    with pytest.raises(ConvergenceError, match="r_cap"):
        theory_sample_iv(1e4, [100.0, 200.0], DEFAULT_ALPHA, config)


def test_fixed_radius_reports_tail_estimate():
    short = POSumConfig(r_max=20.0)
    with pytest.raises(ConvergenceError, match="tail estimate"):
        theory_saturation_sr(1e4, DEFAULT_ALPHA, short)
    with pytest.raises(ConvergenceError, match="R=20"):
        theory_sample_iv(1e4, [100.0], DEFAULT_ALPHA, short)
    with pytest.raises(ConvergenceError):
        theory_cfss(1e4, [100.0], DEFAULT_ALPHA, short)


def test_fixed_radius_within_tolerance():
    # tail ≈ π/40 against a partial sum of ≈ 1.6
    assert theory_saturation_sr(1e4, DEFAULT_ALPHA, POSumConfig(r_max=20.0, tail_tol=0.1)) > 0
    with pytest.raises(ConvergenceError):
        theory_saturation_sr(1e4, DEFAULT_ALPHA, POSumConfig(r_max=20.0, tail_tol=0.01))


def test_fluct_sums_are_not_tail_checked():
    value = theory_staircase_fluct(1e4, DEFAULT_ALPHA, POSumConfig(r_max=5.0))
    assert math.isfinite(value)


@pytest.mark.parametrize("name", ["iv_sa", "iv_rsa_pa", "cfss_rsa_pa"])
def test_default_sums_converge_on_experiment_width_grid(name):
    cfg = resolve_config(name)
    grid = ExperimentContext(cfg).width_grid()
    po = cfg.po_sums()
    iv = theory_sample_iv(cfg.energy, grid, cfg.alpha, po)
    cfss = theory_cfss(cfg.energy, grid, cfg.alpha, po)
    sat = theory_saturation_sr(cfg.energy, cfg.alpha, po)
    assert iv.shape == cfss.shape == grid.shape
    reference = theory_sample_iv(cfg.energy, grid, cfg.alpha, LARGE)
    assert np.max(np.abs(iv - reference)) <= 2e-3 * sat


# ── δ𝒩_Θ ──


def test_fluct_shape_and_phase():
    energies = np.linspace(1e4, 1.01e4, 12).reshape(3, 4)
    config = POSumConfig(r_max=10.0)
    with_phase = theory_staircase_fluct(energies, DEFAULT_ALPHA, config)
    no_phase = theory_staircase_fluct(energies, DEFAULT_ALPHA, config, phase=False)
    assert with_phase.shape == (3, 4)
    assert not np.allclose(with_phase, no_phase)
    assert isinstance(theory_staircase_fluct(1e4, DEFAULT_ALPHA, config), float)


def test_fluct_of_single_mode_family():
    # only (1,0) and (0,1) survive below R = 1.2 in the square
    config = POSumConfig(r_max=1.2)
    energy = 1e4
    expected = 2 * math.sqrt(2.0) * 0.5 * (energy / math.pi ** 5) ** 0.25 * math.sin(
        4.0 * math.sqrt(math.pi * energy) - math.pi / 4.0
    )
    assert theory_staircase_fluct(energy, 1.0, config) == pytest.approx(expected, rel=1e-12)


def test_diagonal_orbit_sets_the_oscillation_period():
    # in the square, radii 1.2 and 1.5 differ only by the (1,1) family
    energies = np.arange(1e4 - 250.0, 1e4 + 250.0, 0.05)
    with_diagonal = theory_staircase_fluct(energies, 1.0, POSumConfig(r_max=1.5))
    diagonal = with_diagonal - theory_staircase_fluct(energies, 1.0, POSumConfig(r_max=1.2))
    crossings = energies[1:][np.diff(np.sign(diagonal)) != 0]
    assert crossings.size >= 6
    period = 2.0 * np.mean(np.diff(crossings))
    assert period == pytest.approx(math.sqrt(math.pi * 1e4) / math.sqrt(2.0), rel=0.01)


def test_alpha_average_of_one_member():
    energies = np.linspace(1e4, 1.001e4, 7)
    config = POSumConfig(r_max=15.0)
    direct = theory_staircase_fluct(energies, 0.9, config)
    np.testing.assert_allclose(alpha_averaged_fluct(energies, [0.9], config), direct)


def test_alpha_average_is_member_mean():
    energies = np.array([1e4, 1.0005e4])
    config = POSumConfig(r_max=15.0)
    alphas = [0.8, 1.0, 1.3]
    expected = sum(theory_staircase_fluct(energies, a, config) for a in alphas) / 3
    np.testing.assert_allclose(alpha_averaged_fluct(energies, alphas, config), expected, rtol=1e-12)


# ── Helpers ──


def test_perimeter_shift():
    assert perimeter_shift(10500.0) == pytest.approx(115.6, abs=0.05)
    with pytest.raises(ValueError):
        perimeter_shift(0.0)


def test_sa_decay_threshold():
    assert sa_decay_threshold(1e5, 1e3, 1.0) == pytest.approx(112099.3, rel=1e-6)
    with pytest.raises(ValueError):
        sa_decay_threshold(1e5, 0.0, 1.0)


def test_best_shift_recovers_known_offset():
    energies = np.linspace(0.0, 300.0, 3001)
    numeric = np.sin(energies / 10.0)
    shifts = np.arange(0.0, 20.0, 0.5)
    best, corr = best_shift(energies, numeric, lambda x: np.sin((x - 7.0) / 10.0), shifts)
    assert best == 7.0
    assert corr.shape == shifts.shape
    assert corr.max() == pytest.approx(1.0)
