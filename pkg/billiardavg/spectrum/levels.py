"""Rectangular billiard eigenvalues in mean-spacing units.

With the area fixed so that the mean level spacing is one, the level with
quantum numbers (n₁, n₂) sits at

    e(n₁, n₂) = (π/4)(n₁² α^-½ + n₂² α^½),

i.e. on lattice points of a quarter ellipse. Enumeration walks the n₁ rows
and solves each row's n₂ range in closed form.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from billiardavg.errors import SpectrumBudgetError
from billiardavg.spectrum.shape import BilliardShape

logger = logging.getLogger(__name__)

DEFAULT_MAX_LEVELS = 20_000_000


@dataclass(frozen=True)
class RawSpectrum:
    """Sorted raw levels e ≤ e_max of one billiard.

    Levels below ``e_min`` are not stored; ``offset`` is their exact number,
    so ``count`` still covers every quantum-number pair up to ``e_max``.
    """

    shape: BilliardShape
    levels: np.ndarray
    e_max: float
    e_min: float = 0.0
    offset: int = 0

    @property
    def count(self) -> int:
        return self.offset + int(self.levels.size)


def _row_coefficients(shape: BilliardShape) -> tuple[float, float]:
    root = math.sqrt(shape.aspect_ratio)
    return math.pi / 4.0 / root, math.pi / 4.0 * root


def _energy(n1: np.ndarray, n2: np.ndarray, p: float, q: float) -> np.ndarray:
    # Single expression shared by counting and materialisation so both agree
    # bit for bit at the cutoffs.
    return p * (n1 * n1) + q * (n2 * n2)


def _row_counts(
    n1: np.ndarray, bound: float, p: float, q: float, strict: bool = False
) -> np.ndarray:
    """Number of n₂ ≥ 1 per row with e ≤ bound (e < bound if ``strict``)."""
    if bound <= 0:
        return np.zeros_like(n1)

    def inside(e):
        return e < bound if strict else e <= bound

    room = np.maximum(bound - p * (n1 * n1), 0.0)
    k = np.floor(np.sqrt(room / q)).astype(np.int64)
    k = np.where((k > 0) & ~inside(_energy(n1, k, p, q)), k - 1, k)
    k = np.where(inside(_energy(n1, k + 1, p, q)), k + 1, k)
    return k


def count_levels(shape: BilliardShape, bound: float, strict: bool = False) -> int:
    """Exact number of levels ≤ bound (or < bound), without materialising them."""
    p, q = _row_coefficients(shape)
    if bound <= 0:
        return 0
    rows = np.arange(1, math.isqrt(int(bound / p)) + 2, dtype=np.int64)
    return int(_row_counts(rows, bound, p, q, strict=strict).sum())


def enumerate_levels(
    shape: BilliardShape,
    e_max: float,
    *,
    e_min: float = 0.0,
    max_levels: int = DEFAULT_MAX_LEVELS,
) -> RawSpectrum:
    """All levels in [e_min, e_max], sorted, degenerate levels repeated.

    Raises SpectrumBudgetError when more than ``max_levels`` levels would be
    materialised.
    """
    if not e_max > 0:
        raise ValueError(f"e_max must be positive, got {e_max}")
    if e_min < 0 or e_min > e_max:
        raise ValueError(f"e_min must lie in [0, e_max], got {e_min}")

    # Weyl estimate first, so absurd cutoffs fail before any allocation.
    estimate = (e_max - e_min) - shape.perimeter_coeff * (
        math.sqrt(e_max) - math.sqrt(e_min)
    )
    if estimate > 1.05 * max_levels + 100:
        raise SpectrumBudgetError(
            f"about {estimate:.3g} levels in [{e_min:g}, {e_max:g}] exceed "
            f"the budget max_levels={max_levels}"
        )

    p, q = _row_coefficients(shape)
    rows = np.arange(1, math.isqrt(int(e_max / p)) + 2, dtype=np.int64)
    hi = _row_counts(rows, e_max, p, q)
    lo = _row_counts(rows, e_min, p, q, strict=True)
    per_row = hi - lo
    total = int(per_row.sum())
    if total > max_levels:
        raise SpectrumBudgetError(
            f"{total} levels in [{e_min:g}, {e_max:g}] exceed the budget "
            f"max_levels={max_levels}"
        )

    starts = np.cumsum(per_row) - per_row
    n1 = np.repeat(rows, per_row)
    n2 = np.repeat(lo + 1 - starts, per_row) + np.arange(total, dtype=np.int64)
    levels = np.sort(_energy(n1, n2, p, q))
    levels.flags.writeable = False

    logger.debug(
        "alpha=%.6g: %d levels in [%g, %g], %d below",
        shape.aspect_ratio, total, e_min, e_max, int(lo.sum()),
    )
    return RawSpectrum(
        shape=shape,
        levels=levels,
        e_max=float(e_max),
        e_min=float(e_min),
        offset=int(lo.sum()),
    )
