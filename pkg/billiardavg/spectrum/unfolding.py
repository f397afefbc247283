"""Weyl unfolding and exact staircase queries.

The mean staircase of a rectangle in mean-spacing units is

    ⟨𝒩(e)⟩ = e − c√e + 1/4,   c = (α^¼ + α^-¼)/√π,

with the perimeter and corner corrections. Mapping every level through it
gives a spectrum of unit mean spacing whose staircase 𝒩(x) fluctuates about
the line 𝒩 = x.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from billiardavg.errors import InvalidWindowError, SpectrumRangeError
from billiardavg.spectrum.levels import DEFAULT_MAX_LEVELS, RawSpectrum, enumerate_levels
from billiardavg.spectrum.shape import BilliardShape

logger = logging.getLogger(__name__)

# Fraction above c²/4 (where the unfolding map turns) that stays untrusted.
MONOTONE_MARGIN = 0.1


def unfold_energy(e, c: float):
    """x(e) = e − c√e + 1/4; works on scalars and arrays."""
    return e - c * np.sqrt(e) + 0.25


def raw_energy(x, c: float):
    """Inverse of ``unfold_energy`` on its increasing branch."""
    root = 0.5 * (c + np.sqrt(c * c + 4.0 * (np.asarray(x, dtype=float) - 0.25)))
    return root * root


@dataclass(frozen=True)
class UnfoldedSpectrum:
    """Unit-mean-spacing levels of one sample, plus where they can be trusted.

    ``offset`` counts levels that lie below the stored ones (windowed
    enumeration); staircase queries add it back.
    """

    levels: np.ndarray
    usable_range: tuple[float, float]
    perimeter_coeff: float = 0.0
    shape: Optional[BilliardShape] = None
    offset: int = 0

    @classmethod
    def from_levels(
        cls,
        levels,
        usable_range: Optional[tuple[float, float]] = None,
        offset: int = 0,
    ) -> "UnfoldedSpectrum":
        """Synthetic spectrum from arbitrary unit-spacing levels."""
        arr = np.sort(np.asarray(levels, dtype=float))
        arr.flags.writeable = False
        if usable_range is None:
            usable_range = (0.0, float(arr[-1]) + 1.0) if arr.size else (0.0, 1.0)
        lo, hi = usable_range
        return cls(levels=arr, usable_range=(float(lo), float(hi)), offset=offset)

    @property
    def x_min(self) -> float:
        return self.usable_range[0]

    @property
    def x_max(self) -> float:
        return self.usable_range[1]

    def covers(self, lo: float, hi: float) -> bool:
        return self.x_min <= lo and hi <= self.x_max

    def require(self, lo: float, hi: float, what: str = "query") -> None:
        """Raise SpectrumRangeError unless [lo, hi] lies in the usable range."""
        if not self.covers(lo, hi):
            label = (
                f"alpha={self.shape.aspect_ratio:.6g} " if self.shape is not None else ""
            )
            raise SpectrumRangeError(
                f"{what} [{lo:.6g}, {hi:.6g}] outside usable range "
                f"[{self.x_min:.6g}, {self.x_max:.6g}] of {label}spectrum"
            )


def unfold(raw: RawSpectrum, margin: float = MONOTONE_MARGIN) -> UnfoldedSpectrum:
    c = raw.shape.perimeter_coeff
    levels = unfold_energy(raw.levels, c)
    levels.flags.writeable = False
    floor = max(1.0, c * c / 4.0 * (1.0 + margin), raw.e_min)
    usable = (float(unfold_energy(floor, c)), float(unfold_energy(raw.e_max, c)))
    return UnfoldedSpectrum(
        levels=levels,
        usable_range=usable,
        perimeter_coeff=c,
        shape=raw.shape,
        offset=raw.offset,
    )


def build_spectrum(
    shape: BilliardShape,
    x_lo: float,
    x_hi: float,
    *,
    max_levels: int = DEFAULT_MAX_LEVELS,
) -> UnfoldedSpectrum:
    """Unfolded spectrum whose usable range covers [x_lo, x_hi].

    Only the raw window behind [x_lo, x_hi] is materialised; everything
    below it is counted.
    """
    if x_hi < x_lo:
        raise InvalidWindowError(f"inverted range [{x_lo}, {x_hi}]")
    c = shape.perimeter_coeff
    floor_x = unfold_energy(max(1.0, c * c / 4.0 * (1.0 + MONOTONE_MARGIN)), c)
    e_hi = float(raw_energy(x_hi, c))
    e_max = e_hi + 1.0 + 1e-9 * e_hi
    if x_lo <= floor_x + 1.0:
        e_min = 0.0
    else:
        e_lo = float(raw_energy(x_lo, c))
        e_min = max(0.0, e_lo - 1.0 - 1e-9 * e_lo)
    raw = enumerate_levels(shape, e_max, e_min=e_min, max_levels=max_levels)
    logger.debug(
        "built alpha=%.6g spectrum for x in [%g, %g] (%d stored levels)",
        shape.aspect_ratio, x_lo, x_hi, raw.levels.size,
    )
    return unfold(raw)


def staircase(spec: UnfoldedSpectrum, x):
    """𝒩(x) = #{levels ≤ x}; scalar in, int out, array in, array out."""
    x = np.asarray(x, dtype=float)
    if x.size:
        spec.require(float(x.min()), float(x.max()), "staircase argument")
    counts = spec.offset + np.searchsorted(spec.levels, x, side="right")
    if counts.ndim == 0:
        return int(counts)
    return counts


def staircase_integrals(
    spec: UnfoldedSpectrum,
    x_lo: float,
    x_hi: float,
    *,
    shift: int = 0,
    origin: float = 0.0,
) -> tuple[float, float, float]:
    """Exact (∫𝒩, ∫𝒩², ∫(x − origin)𝒩) over [x_lo, x_hi].

    𝒩 is replaced by 𝒩 − ``shift``. Both knobs default to the plain
    integrals; statistics pass the window's own count and centre so the
    sums stay small.
    """
    if x_hi < x_lo:
        raise InvalidWindowError(f"inverted window [{x_lo}, {x_hi}]")
    spec.require(x_lo, x_hi, "integration window")

    first = int(np.searchsorted(spec.levels, x_lo, side="right"))
    last = int(np.searchsorted(spec.levels, x_hi, side="right"))
    inner = spec.levels[first:last]

    edges = np.empty(inner.size + 2)
    edges[0] = x_lo
    edges[1:-1] = inner
    edges[-1] = x_hi
    edges -= origin

    values = float(spec.offset + first - shift) + np.arange(inner.size + 1, dtype=float)
    lengths = np.diff(edges)
    midpoints = 0.5 * (edges[1:] + edges[:-1])
    i1 = float(values @ lengths)
    i2 = float((values * values) @ lengths)
    ix = float(values @ (lengths * midpoints))
    return i1, i2, ix
