"""Spectral averaging: many running energies of one spectrum."""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from billiardavg.averaging.base import (
    AbscissaMode,
    CurveRequest,
    EnsemblePlan,
    Method,
    StatisticCurve,
    as_request,
    footprint,
    point_windows,
)
from billiardavg.errors import ConfigurationError
from billiardavg.spectrum.levels import DEFAULT_MAX_LEVELS
from billiardavg.spectrum.shape import BilliardShape
from billiardavg.spectrum.unfolding import UnfoldedSpectrum, build_spectrum
from billiardavg.statistics.sample import evaluate_statistic

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SAPlan(EnsemblePlan):
    """``n_samples`` equally spaced energies over a range ``span`` about ``center``."""

    center: float
    span: float
    n_samples: int = 1000
    shape: BilliardShape = field(default_factory=BilliardShape)

    def __post_init__(self):
        if self.n_samples < 2:
            raise ConfigurationError(f"SA needs at least 2 samples, got {self.n_samples}")
        if not self.span > 0:
            raise ConfigurationError(f"SA range must be positive, got {self.span}")

    @classmethod
    def from_interval(
        cls, lo: float, hi: float, n_samples: int = 1000, shape: Optional[BilliardShape] = None
    ) -> "SAPlan":
        if not hi > lo:
            raise ConfigurationError(f"SA interval [{lo:g}, {hi:g}] is empty")
        return cls(
            center=0.5 * (lo + hi),
            span=hi - lo,
            n_samples=n_samples,
            shape=shape or BilliardShape(),
        )

    @property
    def method(self) -> Method:
        return Method.SA

    @property
    def offsets(self) -> np.ndarray:
        return np.linspace(-0.5 * self.span, 0.5 * self.span, self.n_samples)

    @property
    def grid(self) -> np.ndarray:
        return self.center + self.offsets

    def average(self, request, grid, mode=AbscissaMode.WIDTH, **kwargs) -> StatisticCurve:
        return sa_average(request, self, grid, mode, **kwargs)


def sa_average(
    stat,
    plan: SAPlan,
    grid,
    mode: AbscissaMode = AbscissaMode.WIDTH,
    *,
    spectrum: Optional[UnfoldedSpectrum] = None,
    max_levels: int = DEFAULT_MAX_LEVELS,
) -> StatisticCurve:
    """Mean of a sample statistic over the plan's energy grid.

    In WIDTH mode ``grid`` holds interval widths and the sampled energies sit
    around ``plan.center``; in ENERGY mode every grid point carries its own
    copy of the sampling range. Without ``spectrum`` a single spectrum at
    ``plan.shape`` covering every window is built.
    """
    request: CurveRequest = as_request(stat)
    grid = np.asarray(grid, dtype=float)
    centers, widths = point_windows(request, grid, mode, energy=plan.center)

    sampled = centers[:, None] + plan.offsets[None, :]
    sampled_widths = np.broadcast_to(widths[:, None], sampled.shape)
    if spectrum is None:
        spectrum = build_spectrum(
            plan.shape, *footprint(sampled, sampled_widths), max_levels=max_levels
        )
    values = evaluate_statistic(request.kind, spectrum, sampled, sampled_widths)
    logger.debug(
        "SA %s: %d grid points x %d energies over range %g",
        request.kind.value, grid.size, plan.n_samples, plan.span,
    )
    return StatisticCurve(
        abscissa=grid,
        mean=values.mean(axis=1),
        n_members=plan.n_samples,
        method=Method.SA,
        kind=request.kind,
        label=request.label,
    )
