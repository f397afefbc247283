"""Rescaled spectral averaging.

Statistics whose periodic-orbit form obeys σ(cε, √c·E) = √c·σ(ε, E) can be
averaged over running energies c·ε without washing out their E
oscillations: every sample is mapped back to (ε, E) first.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from billiardavg.averaging.base import (
    AbscissaMode,
    EnsemblePlan,
    Method,
    StatisticCurve,
    as_request,
    footprint,
    point_windows,
)
from billiardavg.errors import ConfigurationError, UnsupportedStatisticError
from billiardavg.spectrum.levels import DEFAULT_MAX_LEVELS
from billiardavg.spectrum.shape import BilliardShape
from billiardavg.spectrum.unfolding import UnfoldedSpectrum, build_spectrum
from billiardavg.statistics.sample import evaluate_statistic
from billiardavg.statistics.window import StatisticKind

logger = logging.getLogger(__name__)

RESCALABLE = (StatisticKind.IV, StatisticKind.CFSS, StatisticKind.SAT_SR)


@dataclass(frozen=True)
class RSAPlan(EnsemblePlan):
    base_energy: float
    scale_ratios: np.ndarray
    shape: BilliardShape = field(default_factory=BilliardShape)

    def __post_init__(self):
        ratios = np.asarray(self.scale_ratios, dtype=float)
        if ratios.ndim != 1 or ratios.size == 0:
            raise ConfigurationError("RSA needs a non-empty 1-d array of scale ratios")
        if np.any(ratios < 1.0):
            raise ConfigurationError("RSA scale ratios must all be >= 1")
        if not self.base_energy > 0:
            raise ConfigurationError(f"RSA base energy must be positive, got {self.base_energy}")
        object.__setattr__(self, "scale_ratios", ratios)

    @classmethod
    def uniform(
        cls,
        base_energy: float,
        ratio_max: float = 2.0,
        n_samples: int = 1000,
        shape: Optional[BilliardShape] = None,
    ) -> "RSAPlan":
        """c_i equally spaced on [1, ratio_max]; c_0 = 1."""
        if n_samples < 1 or ratio_max < 1.0:
            raise ConfigurationError(
                f"RSA needs n_samples >= 1 and ratio_max >= 1, got {n_samples}, {ratio_max}"
            )
        return cls(
            base_energy=base_energy,
            scale_ratios=np.linspace(1.0, ratio_max, n_samples),
            shape=shape or BilliardShape(),
        )

    @property
    def n(self) -> int:
        return int(self.scale_ratios.size)

    @property
    def method(self) -> Method:
        return Method.RSA

    def average(self, request, grid, mode=AbscissaMode.WIDTH, **kwargs) -> StatisticCurve:
        return rsa_average(request, self, grid, mode, **kwargs)


def rsa_average(
    stat,
    plan: RSAPlan,
    grid,
    mode: AbscissaMode = AbscissaMode.WIDTH,
    *,
    spectrum: Optional[UnfoldedSpectrum] = None,
    max_levels: int = DEFAULT_MAX_LEVELS,
) -> StatisticCurve:
    """Mean over i of σ(c_i ε, √c_i E)/√c_i.

    Saturation rigidity scales its window with √c_i as well, so the E_sat/√ε
    ratio of every sample matches the base point.
    """
    request = as_request(stat)
    if request.kind not in RESCALABLE:
        raise UnsupportedStatisticError(
            f"{request.kind.value} has no rescaled form; RSA supports "
            f"{', '.join(k.value for k in RESCALABLE)}"
        )
    grid = np.asarray(grid, dtype=float)
    centers, widths = point_windows(request, grid, mode, energy=plan.base_energy)

    ratios = plan.scale_ratios
    roots = np.sqrt(ratios)
    sampled = centers[:, None] * ratios[None, :]
    sampled_widths = widths[:, None] * roots[None, :]
    if spectrum is None:
        spectrum = build_spectrum(
            plan.shape, *footprint(sampled, sampled_widths), max_levels=max_levels
        )
    values = evaluate_statistic(request.kind, spectrum, sampled, sampled_widths)
    logger.debug(
        "RSA %s: %d grid points x %d ratios in [%g, %g]",
        request.kind.value, grid.size, plan.n, ratios.min(), ratios.max(),
    )
    return StatisticCurve(
        abscissa=grid,
        mean=(values / roots[None, :]).mean(axis=1),
        n_members=plan.n,
        method=Method.RSA,
        kind=request.kind,
        label=request.label,
    )
