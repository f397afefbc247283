import warnings

import numpy as np
import pytest

from billiardavg.errors import InvalidWindowError, SaturationWarning, SpectrumRangeError
from billiardavg.spectrum.shape import BilliardShape
from billiardavg.spectrum.unfolding import UnfoldedSpectrum, build_spectrum, staircase
from billiardavg.statistics.sample import (
    check_saturation_width,
    evaluate_statistic,
    fluctuation_mean_square,
    sample_cfss,
    sample_fluct,
    sample_gv,
    sample_iv,
    sample_saturation_sr,
    sample_sr,
    sample_statistic,
    saturation_width,
)
from billiardavg.statistics.window import SampleStatistic, StatisticKind, Window


@pytest.fixture(scope="module")
def random_spectrum():
    rng = np.random.default_rng(2012)
    return UnfoldedSpectrum.from_levels(np.sort(rng.uniform(0.0, 200.0, 200)))


@pytest.fixture(scope="module")
def billiard_spectrum():
    return build_spectrum(BilliardShape(), 9000.0, 12000.0)


def exact_least_squares(spec: UnfoldedSpectrum, w: Window) -> float:
    """min over (A, B) of (1/E)∫(𝒩 − A − Bω)² by explicit normal equations."""
    lo, hi = w.lower, w.upper
    base = staircase(spec, lo)
    inner = [x for x in spec.levels if lo < x <= hi]
    edges = [lo] + inner + [hi]
    s_n = s_nn = s_wn = 0.0
    for j in range(len(edges) - 1):
        a, b = edges[j] - w.center, edges[j + 1] - w.center
        n = float(staircase(spec, edges[j]) - base) if j else 0.0
        s_n += n * (b - a)
        s_nn += n * n * (b - a)
        s_wn += n * (b * b - a * a) / 2.0
    e = w.width
    # ∫1 = E, ∫ω = 0, ∫ω² = E³/12 over the centred window
    a_fit = s_n / e
    b_fit = s_wn / (e ** 3 / 12.0)
    residual = s_nn - 2 * a_fit * s_n - 2 * b_fit * s_wn + a_fit ** 2 * e + b_fit ** 2 * e ** 3 / 12.0
    return residual / e


# ── Window ──


def test_window_edges():
    w = Window(10.0, 4.0)
    assert (w.lower, w.upper) == (8.0, 12.0)


def test_window_rejects_negative_width():
    with pytest.raises(ValueError):
        Window(1.0, -1.0)


# ── Sample statistics ──


def test_iv_of_picket_fence_is_zero():
    spec = UnfoldedSpectrum.from_levels(np.arange(100) + 0.5)
    for center in (10.0, 33.3, 50.5):
        for width in (1.0, 3.0, 7.0):
            assert sample_iv(spec, Window(center, width)) == 0.0


def test_iv_counts_interval():
    spec = UnfoldedSpectrum.from_levels([1.0, 2.0, 2.5, 7.0], usable_range=(0.0, 10.0))
    # (1, 3] holds two levels against an expected two
    assert sample_iv(spec, Window(2.0, 2.0)) == 0.0
    # (0, 4] holds three against four
    assert sample_iv(spec, Window(2.0, 4.0)) == 1.0


def test_gv_and_fluct():
    spec = UnfoldedSpectrum.from_levels([1.0, 2.0, 3.0], usable_range=(0.0, 5.0))
    assert sample_fluct(spec, 2.5) == pytest.approx(-0.5)
    assert sample_gv(spec, 2.5) == pytest.approx(0.25)


def test_single_step_rigidity_is_one_sixteenth():
    spec = UnfoldedSpectrum.from_levels([5.0], usable_range=(0.0, 10.0))
    for width in (0.5, 2.0, 8.0):
        assert sample_sr(spec, Window(5.0, width)) == pytest.approx(1.0 / 16.0, abs=1e-15)


def test_rigidity_matches_explicit_least_squares(random_spectrum):
    rng = np.random.default_rng(7)
    for _ in range(100):
        w = Window(rng.uniform(40.0, 160.0), rng.uniform(1.0, 60.0))
        expected = exact_least_squares(random_spectrum, w)
        assert sample_sr(random_spectrum, w) == pytest.approx(expected, rel=1e-8, abs=1e-12)


def test_rigidity_matches_fine_grid_fit(random_spectrum):
    w = Window(100.0, 10.0)
    x = np.linspace(w.lower, w.upper, 2_000_001)
    counts = staircase(random_spectrum, x).astype(float)
    slope, intercept = np.polyfit(x - w.center, counts, 1)
    residual = np.mean((counts - intercept - slope * (x - w.center)) ** 2)
    assert sample_sr(random_spectrum, w) == pytest.approx(residual, rel=1e-3)


def test_rigidity_needs_positive_width(random_spectrum):
    with pytest.raises(InvalidWindowError):
        sample_sr(random_spectrum, Window(50.0, 0.0))


def test_rigidity_outside_range(random_spectrum):
    with pytest.raises(SpectrumRangeError):
        sample_sr(random_spectrum, Window(199.0, 50.0))


def test_cfss_gv_iv_identity(billiard_spectrum):
    rng = np.random.default_rng(31)
    for _ in range(200):
        # dyadic edges keep every deviation exact
        center = rng.integers(9500 * 8, 11500 * 8) / 8.0
        width = rng.integers(0, 400 * 4) / 4.0
        w = Window(center, width)
        k = sample_cfss(billiard_spectrum, w)
        g1 = sample_gv(billiard_spectrum, w.lower)
        g2 = sample_gv(billiard_spectrum, w.upper)
        iv = sample_iv(billiard_spectrum, w)
        assert k == pytest.approx(0.5 * g1 + 0.5 * g2 - 0.5 * iv, rel=1e-12, abs=1e-12)


# ── Window mean of GV ──


def test_fluctuation_mean_square_picket_fence():
    spec = UnfoldedSpectrum.from_levels(np.arange(1000) + 0.5)
    # 𝒩 − x is a unit sawtooth with mean square 1/12
    assert fluctuation_mean_square(spec, Window(500.0, 200.0)) == pytest.approx(1.0 / 12.0)


def test_fluctuation_mean_square_bounds_rigidity():
    spec = build_spectrum(BilliardShape(), 9.4e4, 1.06e5)
    w = Window(1e5, 1e4)
    mean_gv = fluctuation_mean_square(spec, w)
    rigidity = sample_sr(spec, w)
    assert mean_gv >= rigidity
    assert rigidity == pytest.approx(mean_gv, rel=0.1)


def test_fluctuation_mean_square_zero_width(random_spectrum):
    assert fluctuation_mean_square(random_spectrum, Window(42.0)) == sample_gv(random_spectrum, 42.0)


# ── Saturation rigidity ──


def test_saturation_width_rule():
    widths = saturation_width(np.array([1e3, 1e4, 2e4]))
    assert list(widths) == [1e3, 1e3, 5e3]


def test_saturation_window_too_narrow():
    with pytest.raises(InvalidWindowError):
        check_saturation_width(1e4, 400.0)


def test_saturation_window_marginal_warns():
    with pytest.warns(SaturationWarning):
        check_saturation_width(1e4, 700.0)


def test_saturation_window_wide_is_silent():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        check_saturation_width(1e4, 1000.0)


def test_saturation_rigidity_equals_wide_window_rigidity(billiard_spectrum):
    value = sample_saturation_sr(billiard_spectrum, 1e4, 1e3)
    assert value == sample_sr(billiard_spectrum, Window(1e4, 1e3))
    assert value > 0


# ── evaluate_statistic ──


def test_vectorised_evaluation_matches_scalar(billiard_spectrum):
    centers = np.array([9800.0, 10123.4, 11000.0])
    widths = np.array([0.0, 17.5, 250.0])
    spec = billiard_spectrum
    iv = evaluate_statistic(StatisticKind.IV, spec, centers, widths)
    gv = evaluate_statistic(StatisticKind.GV, spec, centers, widths)
    fluct = evaluate_statistic(StatisticKind.FLUCT, spec, centers)
    cfss = evaluate_statistic(StatisticKind.CFSS, spec, centers, widths)
    sr = evaluate_statistic(StatisticKind.SR, spec, centers[1:], widths[1:])
    for i, (c, w) in enumerate(zip(centers, widths)):
        assert iv[i] == sample_iv(spec, Window(c, w))
        assert gv[i] == sample_gv(spec, c)
        assert fluct[i] == sample_fluct(spec, c)
        assert cfss[i] == sample_cfss(spec, Window(c, w))
    assert sr[0] == sample_sr(spec, Window(centers[1], widths[1]))


def test_vectorised_evaluation_broadcasts(billiard_spectrum):
    centers = np.linspace(10000.0, 10100.0, 4)[:, None]
    widths = np.array([10.0, 20.0, 30.0])[None, :]
    out = evaluate_statistic(StatisticKind.IV, billiard_spectrum, centers, widths)
    assert out.shape == (4, 3)


def test_vectorised_evaluation_checks_whole_footprint(billiard_spectrum):
    with pytest.raises(SpectrumRangeError):
        evaluate_statistic(StatisticKind.IV, billiard_spectrum, [10000.0, 11990.0], [10.0, 100.0])


def test_statistic_kind_flags():
    assert not StatisticKind.GV.uses_width
    assert StatisticKind.SAT_SR.uses_width
    assert not StatisticKind.CFSS.non_negative


def test_sample_statistic_rejects_negative_squares():
    w = Window(100.0, 5.0)
    for kind in (StatisticKind.IV, StatisticKind.GV, StatisticKind.SR, StatisticKind.SAT_SR):
        with pytest.raises(ValueError, match="cannot be negative"):
            SampleStatistic(kind, -1e-3, w)
    assert SampleStatistic(StatisticKind.CFSS, -2.5, w).value == -2.5
    assert SampleStatistic(StatisticKind.FLUCT, -0.5, w).value == -0.5


def test_sample_statistic_dispatch(billiard_spectrum):
    w = Window(1.05e4, 600.0)
    direct = {
        StatisticKind.IV: sample_iv(billiard_spectrum, w),
        StatisticKind.GV: sample_gv(billiard_spectrum, w.center),
        StatisticKind.FLUCT: sample_fluct(billiard_spectrum, w.center),
        StatisticKind.CFSS: sample_cfss(billiard_spectrum, w),
        StatisticKind.SR: sample_sr(billiard_spectrum, w),
    }
    for kind, value in direct.items():
        stat = sample_statistic(kind, billiard_spectrum, w)
        assert (stat.kind, stat.value, stat.window) == (kind, value, w)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        sat = sample_statistic(StatisticKind.SAT_SR, billiard_spectrum, Window(1.05e4, 1.1e3))
    assert sat.value == sample_sr(billiard_spectrum, Window(1.05e4, 1.1e3))
    with pytest.raises(InvalidWindowError):
        sample_statistic(StatisticKind.SAT_SR, billiard_spectrum, Window(1.05e4, 400.0))
