"""Periodic-orbit families (winding modes) of the rectangle."""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from billiardavg.errors import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class POSumConfig:
    """Truncation of the periodic-orbit sums.

    ``r_max=None`` lets absolutely convergent sums double their radius from
    ``r_start`` until the tail-corrected value moves by less than the
    tolerance (relative to the saturation sum), giving up at ``r_cap``. The
    saturation sum uses ``tail_tol``; the sine-squared sums use ``sine_tol``.
    Their lattice discrepancy still moves them by ~5e-6 at R = 1024.

    A fixed ``r_max`` must keep the analytic tail of Σδ²/R³ below
    ``tail_tol`` times the partial sum. Fluctuation sums do not converge
    absolutely and always use a fixed radius, ``fluct_r_max`` unless
    ``r_max`` is given, with no tail check.
    """

    r_max: Optional[float] = None
    tail_tol: float = 1e-6
    sine_tol: float = 1e-4
    r_start: float = 32.0
    r_cap: float = 1024.0
    fluct_r_max: float = 30.0
    tail_correction: bool = True

    def __post_init__(self):
        if self.r_max is not None and self.r_max <= 0:
            raise ConfigurationError(f"r_max must be positive, got {self.r_max}")
        if not self.tail_tol > 0:
            raise ConfigurationError(f"tail_tol must be positive, got {self.tail_tol}")
        if not self.sine_tol > 0:
            raise ConfigurationError(f"sine_tol must be positive, got {self.sine_tol}")


def mode_weight(m1: int, m2: int) -> float:
    """δ_M: 0 for (0,0), 1/2 on an axis, 1 otherwise."""
    if m1 == 0 and m2 == 0:
        return 0.0
    if m1 == 0 or m2 == 0:
        return 0.5
    return 1.0


def scaled_length(m1, m2, alpha: float):
    """R_M = √(M₁² α^½ + M₂² α^-½)."""
    root = math.sqrt(alpha)
    return np.sqrt(np.asarray(m1, dtype=float) ** 2 * root + np.asarray(m2, dtype=float) ** 2 / root)


def shortest_length(alpha: float) -> float:
    """Smallest R_M among modes with non-zero weight: (1,0) or (0,1)."""
    q = alpha ** 0.25
    return min(q, 1.0 / q)


@dataclass(frozen=True)
class ModeTable:
    """All modes with R_M ≤ r_max, held column-wise."""

    alpha: float
    r_max: float
    m1: np.ndarray
    m2: np.ndarray
    weight: np.ndarray
    length: np.ndarray

    def __len__(self) -> int:
        return int(self.m1.size)

    @property
    def perimeter_slope(self) -> float:
        """s in the weighted mode count Σ_{R≤r} δ² ≈ πr²/4 − s·r/4."""
        q = self.alpha ** 0.25
        return q + 1.0 / q


def enumerate_modes(alpha: float, r_max: float) -> ModeTable:
    """Modes (M₁, M₂) ≠ (0, 0), M ≥ 0, with R_M ≤ r_max."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if r_max < shortest_length(alpha):
        raise ConfigurationError(
            f"r_max={r_max:g} includes no winding mode "
            f"(shortest orbit has R={shortest_length(alpha):.4g})"
        )
    root = math.sqrt(alpha)
    a1 = np.arange(0, int(r_max / math.sqrt(root)) + 1)
    a2 = np.arange(0, int(r_max * math.sqrt(root)) + 1)
    g1, g2 = np.meshgrid(a1, a2, indexing="ij")
    r2 = g1 * g1 * root + g2 * g2 / root
    keep = (r2 <= r_max * r_max) & ((g1 > 0) | (g2 > 0))
    m1, m2 = g1[keep], g2[keep]
    weight = np.where((m1 == 0) | (m2 == 0), 0.5, 1.0)
    length = np.sqrt(r2[keep])
    logger.debug("alpha=%.6g: %d winding modes with R <= %g", alpha, m1.size, r_max)
    return ModeTable(alpha=alpha, r_max=float(r_max), m1=m1, m2=m2, weight=weight, length=length)
