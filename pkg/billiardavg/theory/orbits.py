"""Periodic-orbit predictions in the diagonal approximation.

In unit-mean-spacing variables every rectangle statistic reduces to sums
over winding modes M with weight δ_M and scaled length R_M:

    σ_Θ(ε, E)   = 4√(ε/π⁵) Σ δ²/R³ sin²(√(π/ε) R E)
    δ₃^∞(ε)     =  √(ε/π⁵) Σ δ²/R³
    k_Θ(ε, E)   = δ₃^∞(ε) − σ_Θ(ε, E)/2
    δ𝒩_Θ(ε)     = Σ √2 δ (ε/π⁵)^¼ R^-3/2 sin(4√(πε) R − π/4)

The first two sums converge like 1/r_max, so beyond the radius they carry
the continuum tail of the weighted mode density (π/2)R − s/4.
"""

import functools
import logging
import math
from typing import Callable, Sequence

import numpy as np
from scipy.special import sici

from billiardavg.errors import ConvergenceError
from billiardavg.theory.modes import ModeTable, POSumConfig, enumerate_modes, shortest_length

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = POSumConfig()

# Largest (points × modes) block evaluated in one numpy call.
_BLOCK = 4_000_000


@functools.lru_cache(maxsize=64)
def _mode_table(alpha: float, r_max: float) -> ModeTable:
    return enumerate_modes(alpha, r_max)


def _saturation_tail(table: ModeTable) -> float:
    r = table.r_max
    return math.pi / (2.0 * r) - table.perimeter_slope / (8.0 * r * r)


def _sine_tail(table: ModeTable, k: np.ndarray) -> np.ndarray:
    """∫_r^∞ sin²(kR) R⁻³ dW for the smooth weighted mode density."""
    r = table.r_max
    out = np.zeros_like(k)
    pos = k > 0
    kp = k[pos]
    a = kp * r
    si, ci = sici(2.0 * a)
    s2 = np.sin(a) ** 2
    bulk = 0.5 * math.pi * (s2 / r + kp * (0.5 * math.pi - si))
    edge = kp * kp * (s2 / (2.0 * a * a) + np.sin(2.0 * a) / (2.0 * a) - ci)
    out[pos] = bulk - 0.25 * table.perimeter_slope * edge
    return out


def _saturation_sum(table: ModeTable, tail: bool) -> float:
    total = float(np.sum(table.weight ** 2 / table.length ** 3))
    if tail:
        total += _saturation_tail(table)
    return total


def _sine_sum(table: ModeTable, k: np.ndarray, tail: bool) -> np.ndarray:
    """Σ δ²/R³ sin²(kR) for each k."""
    coeff = table.weight ** 2 / table.length ** 3
    out = np.empty(k.shape)
    step = max(1, _BLOCK // max(len(table), 1))
    for start in range(0, k.size, step):
        block = k[start:start + step]
        out[start:start + step] = np.sin(np.multiply.outer(block, table.length)) ** 2 @ coeff
    if tail:
        out += _sine_tail(table, k)
    return out


def _check_fixed_radius(table: ModeTable, tol: float) -> None:
    partial = _saturation_sum(table, tail=False)
    estimate = _saturation_tail(table)
    if estimate > tol * partial:
        raise ConvergenceError(
            f"periodic-orbit sum for alpha={table.alpha:.6g} truncated at R={table.r_max:g} "
            f"has tail estimate {estimate:.3e}, above tail_tol x partial sum "
            f"({tol:.1e} x {partial:.4g}); raise r_max or tail_tol, or leave r_max unset"
        )


def _converged(
    alpha: float,
    config: POSumConfig,
    evaluate: Callable[[ModeTable], np.ndarray],
    tol: float,
) -> np.ndarray:
    """Evaluate a mode sum at a fixed radius, or double the radius until stable.

    Stability is measured against the saturation sum Σδ²/R³, which bounds
    every sine-squared sum. A fixed radius is checked against the analytic
    tail of that sum instead.
    """
    tail = config.tail_correction
    if config.r_max is not None:
        table = _mode_table(alpha, float(config.r_max))
        _check_fixed_radius(table, config.tail_tol)
        return evaluate(table)

    r = max(config.r_start, 2.0 * shortest_length(alpha))
    previous = evaluate(_mode_table(alpha, r))
    while True:
        r *= 2.0
        table = _mode_table(alpha, r)
        current = evaluate(table)
        scale = _saturation_sum(table, tail)
        change = float(np.max(np.abs(current - previous))) / scale if current.size else 0.0
        if change <= tol:
            logger.debug("alpha=%.6g: mode sum converged at R=%g (change %.2e)", alpha, r, change)
            return current
        if r >= config.r_cap:
            raise ConvergenceError(
                f"periodic-orbit sum for alpha={alpha:.6g} changed by {change:.3e} "
                f"(tolerance {tol:.1e}) when doubling R to {r:g}; "
                f"raise r_cap or the tolerance"
            )
        previous = current


def theory_sample_iv(energy: float, width, alpha: float, config: POSumConfig = DEFAULT_CONFIG):
    """σ_Θ(ε, E); ``width`` may be a scalar or an array of interval widths."""
    if not energy > 0:
        raise ValueError(f"running energy must be positive, got {energy}")
    widths = np.asarray(width, dtype=float)
    if np.any(widths < 0):
        raise ValueError("interval widths must be non-negative")
    k = math.sqrt(math.pi / energy) * widths.reshape(-1)
    sums = _converged(
        alpha, config, lambda t: _sine_sum(t, k, config.tail_correction), config.sine_tol
    )
    values = 4.0 * math.sqrt(energy / math.pi ** 5) * sums
    return float(values[0]) if widths.ndim == 0 else values.reshape(widths.shape)


def theory_saturation_sr(energy, alpha: float, config: POSumConfig = DEFAULT_CONFIG):
    """δ₃^∞_Θ(ε) = √(ε/π⁵) Σ δ²/R³; ``energy`` may be an array."""
    energies = np.asarray(energy, dtype=float)
    if np.any(energies <= 0):
        raise ValueError("running energy must be positive")
    total = _converged(
        alpha,
        config,
        lambda t: np.array([_saturation_sum(t, config.tail_correction)]),
        config.tail_tol,
    )[0]
    values = np.sqrt(energies / math.pi ** 5) * total
    return float(values) if values.ndim == 0 else values


def theory_cfss(energy: float, width, alpha: float, config: POSumConfig = DEFAULT_CONFIG):
    """k_Θ(ε, E) = δ₃^∞(ε) − σ_Θ(ε, E)/2."""
    return theory_saturation_sr(energy, alpha, config) - 0.5 * theory_sample_iv(
        energy, width, alpha, config
    )


def _fluct_table(alpha: float, config: POSumConfig) -> ModeTable:
    radius = config.r_max if config.r_max is not None else config.fluct_r_max
    return _mode_table(alpha, float(radius))


def staircase_fluct_amplitudes(energy: float, table: ModeTable) -> np.ndarray:
    """amp_M = √2 δ_M (ε/π⁵)^¼ R_M^-3/2."""
    return math.sqrt(2.0) * table.weight * (energy / math.pi ** 5) ** 0.25 * table.length ** -1.5


def theory_staircase_fluct(
    energy,
    alpha: float,
    config: POSumConfig = DEFAULT_CONFIG,
    phase: bool = True,
):
    """δ𝒩_Θ(ε) truncated at a fixed radius; ``phase=False`` drops the −π/4."""
    energies = np.asarray(energy, dtype=float)
    if np.any(energies <= 0):
        raise ValueError("running energy must be positive")
    table = _fluct_table(alpha, config)
    flat = energies.reshape(-1)
    out = np.empty(flat.shape)
    shift = math.pi / 4.0 if phase else 0.0
    base = math.sqrt(2.0) * table.weight * table.length ** -1.5
    step = max(1, _BLOCK // max(len(table), 1))
    for start in range(0, flat.size, step):
        e = flat[start:start + step]
        arg = np.multiply.outer(4.0 * np.sqrt(math.pi * e), table.length) - shift
        out[start:start + step] = (e / math.pi ** 5) ** 0.25 * (np.sin(arg) @ base)
    return float(out[0]) if energies.ndim == 0 else out.reshape(energies.shape)


def alpha_averaged_fluct(
    energy,
    alphas: Sequence[float],
    config: POSumConfig = DEFAULT_CONFIG,
    phase: bool = True,
) -> np.ndarray:
    """Mean of δ𝒩_Θ over an aspect-ratio ensemble, summed in index order."""
    energies = np.asarray(energy, dtype=float)
    total = np.zeros(energies.shape)
    for alpha in alphas:
        total += theory_staircase_fluct(energies, float(alpha), config, phase=phase)
    return total / len(alphas)


def perimeter_shift(mean_energy: float) -> float:
    """r with πr²/4 = mean energy; theory curves move left by r."""
    if not mean_energy > 0:
        raise ValueError(f"mean energy must be positive, got {mean_energy}")
    return math.sqrt(4.0 * mean_energy / math.pi)


def sa_decay_threshold(energy: float, width: float, alpha: float) -> float:
    """Sampling range beyond which SA washes out IV oscillations.

    ϵ* = 2√π ε^3/2 / (R_min E), with R_min the shortest weighted orbit.
    """
    if not (energy > 0 and width > 0):
        raise ValueError("energy and width must be positive")
    return 2.0 * math.sqrt(math.pi) * energy ** 1.5 / (shortest_length(alpha) * width)


def best_shift(
    energies,
    numeric,
    theory: Callable[[np.ndarray], np.ndarray],
    shifts,
) -> tuple[float, np.ndarray]:
    """Leftward shift of ``theory`` that best correlates with ``numeric``.

    A shift r compares numeric(ε) with theory(ε + r). Returns the best
    shift and the Pearson correlation for every candidate.
    """
    energies = np.asarray(energies, dtype=float)
    numeric = np.asarray(numeric, dtype=float)
    shifts = np.asarray(shifts, dtype=float)
    corr = np.empty(shifts.shape)
    for i, r in enumerate(shifts):
        corr[i] = np.corrcoef(numeric, theory(energies + r))[0, 1]
    return float(shifts[int(np.argmax(corr))]), corr
