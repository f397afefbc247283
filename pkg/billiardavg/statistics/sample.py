"""Single-spectrum (sample) statistics.

All statistics read the unfolded staircase 𝒩 and its deviation
δ𝒩(x) = 𝒩(x) − x. Windows are [ε − E/2, ε + E/2].
"""

import math
import warnings

import numpy as np

from billiardavg.errors import InvalidWindowError, SaturationWarning
from billiardavg.spectrum.unfolding import UnfoldedSpectrum, staircase, staircase_integrals
from billiardavg.statistics.window import SampleStatistic, StatisticKind, Window


# Saturation windows narrower than these multiples of √ε warn / fail.
SATURATION_WARN_FACTOR = 10.0
SATURATION_MIN_FACTOR = 5.0


def _deviation(spec: UnfoldedSpectrum, x):
    return staircase(spec, x) - np.asarray(x, dtype=float)


def sample_iv(spec: UnfoldedSpectrum, w: Window) -> float:
    """σ(ε, E) = [𝒩(ε₂) − 𝒩(ε₁) − E]²."""
    n = staircase(spec, w.upper) - staircase(spec, w.lower)
    return float((n - w.width) ** 2)


def sample_gv(spec: UnfoldedSpectrum, energy: float) -> float:
    """σ_g(ε) = [𝒩(ε) − ε]²."""
    return float(_deviation(spec, energy) ** 2)


def sample_fluct(spec: UnfoldedSpectrum, energy: float) -> float:
    """δ𝒩(ε) = 𝒩(ε) − ε."""
    return float(_deviation(spec, energy))


def sample_cfss(spec: UnfoldedSpectrum, w: Window) -> float:
    """k(ε, E) = δ𝒩(ε₁)·δ𝒩(ε₂)."""
    return float(_deviation(spec, w.lower) * _deviation(spec, w.upper))


def sample_sr(spec: UnfoldedSpectrum, w: Window) -> float:
    """Least-squares rigidity δ₃(ε, E) from exact staircase integrals.

    Uses (1/E)∫𝒩² − [(1/E)∫𝒩]² − 12[(1/E²)∫ω𝒩(ε+ω)dω]², which is the
    minimised residual of fitting A + Bx to 𝒩 over the window.
    """
    if not w.width > 0:
        raise InvalidWindowError("spectral rigidity needs a window of positive width")
    spec.require(w.lower, w.upper, "rigidity window")
    # Constant shifts of 𝒩 leave δ₃ unchanged; subtracting the count at the
    # lower edge keeps the squares small.
    shift = staircase(spec, w.lower)
    m1, m2, mw = staircase_integrals(spec, w.lower, w.upper, shift=shift, origin=w.center)
    e = w.width
    value = m2 / e - (m1 / e) ** 2 - 12.0 * (mw / (e * e)) ** 2
    return max(value, 0.0)


def fluctuation_mean_square(spec: UnfoldedSpectrum, w: Window) -> float:
    """(1/E)∫(𝒩 − x)² dx over the window, i.e. the window mean of σ_g."""
    if w.width == 0:
        return sample_gv(spec, w.center)
    spec.require(w.lower, w.upper, "window")
    shift = staircase(spec, w.lower)
    m1, m2, mw = staircase_integrals(spec, w.lower, w.upper, shift=shift, origin=w.center)
    e = w.width
    # 𝒩 − x = (𝒩 − shift) − ω + d with ω = x − ε and d = shift − ε
    d = shift - w.center
    total = m2 - 2.0 * mw + 2.0 * d * m1 + e ** 3 / 12.0 + d * d * e
    return total / e


def check_saturation_width(energy: float, width: float) -> None:
    """Reject windows narrower than 5√ε and warn below 10√ε."""
    root = math.sqrt(energy)
    if width < SATURATION_MIN_FACTOR * root:
        raise InvalidWindowError(
            f"saturation window E={width:g} is below {SATURATION_MIN_FACTOR:g}·√ε "
            f"= {SATURATION_MIN_FACTOR * root:.4g} at ε={energy:g}"
        )
    if width < SATURATION_WARN_FACTOR * root:
        warnings.warn(
            f"saturation window E={width:g} is below {SATURATION_WARN_FACTOR:g}·√ε "
            f"at ε={energy:g}; rigidity may not be saturated",
            SaturationWarning,
            stacklevel=3,
        )


def sample_saturation_sr(spec: UnfoldedSpectrum, energy: float, width: float) -> float:
    """δ₃^∞(ε), the rigidity over a window E_sat ≫ √ε."""
    if not energy > 0:
        raise ValueError(f"running energy must be positive, got {energy}")
    check_saturation_width(energy, width)
    return sample_sr(spec, Window(energy, width))


def saturation_width(energy, split: float = 1e4, low: float = 1e3, high: float = 5e3):
    """Saturation window: ``low`` up to ε = ``split``, ``high`` above."""
    return np.where(np.asarray(energy) <= split, low, high).astype(float)


def evaluate_statistic(
    kind: StatisticKind, spec: UnfoldedSpectrum, centers, widths=0.0
) -> np.ndarray:
    """Sample statistic on broadcast (centre, width) arrays.

    Width is ignored by GV and FLUCT. The whole broadcast footprint is
    range-checked before anything is evaluated.
    """
    centers, widths = np.broadcast_arrays(
        np.asarray(centers, dtype=float), np.asarray(widths, dtype=float)
    )
    if not kind.uses_width:
        widths = np.zeros_like(centers)
    if centers.size == 0:
        return np.zeros(centers.shape)
    if np.any(widths < 0):
        raise InvalidWindowError("window widths must be non-negative")

    lower = centers - 0.5 * widths
    upper = centers + 0.5 * widths
    spec.require(float(lower.min()), float(upper.max()), f"{kind.value} windows")

    if kind is StatisticKind.IV:
        n = staircase(spec, upper) - staircase(spec, lower)
        return (n - widths) ** 2
    if kind is StatisticKind.GV:
        return _deviation(spec, centers) ** 2
    if kind is StatisticKind.FLUCT:
        return _deviation(spec, centers).astype(float)
    if kind is StatisticKind.CFSS:
        return _deviation(spec, lower) * _deviation(spec, upper)

    out = np.empty(centers.shape)
    flat = out.reshape(-1)
    for i, (c, w) in enumerate(zip(centers.reshape(-1), widths.reshape(-1))):
        if kind is StatisticKind.SAT_SR:
            flat[i] = sample_saturation_sr(spec, float(c), float(w))
        else:
            flat[i] = sample_sr(spec, Window(float(c), float(w)))
    return out


def sample_statistic(kind: StatisticKind, spec: UnfoldedSpectrum, w: Window) -> SampleStatistic:
    """Evaluate one statistic over one window.

    GV and FLUCT read only the centre; SAT_SR enforces the saturation width.
    """
    if kind is StatisticKind.IV:
        value = sample_iv(spec, w)
    elif kind is StatisticKind.GV:
        value = sample_gv(spec, w.center)
    elif kind is StatisticKind.FLUCT:
        value = sample_fluct(spec, w.center)
    elif kind is StatisticKind.CFSS:
        value = sample_cfss(spec, w)
    elif kind is StatisticKind.SR:
        value = sample_sr(spec, w)
    else:
        value = sample_saturation_sr(spec, w.center, w.width)
    return SampleStatistic(kind, value, w)
