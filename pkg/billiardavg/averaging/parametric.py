"""Parametric averaging: a Gaussian ensemble of aspect ratios at fixed energy.

Each member is its own rectangle, so each gets its own (windowed) spectrum.
Members are independent; the mean is always reduced over the stacked,
index-ordered member array so the sequential and executor paths agree bit
for bit.
"""

import asyncio
import functools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

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
from billiardavg.errors import ConfigurationError, SpectrumRangeError
from billiardavg.spectrum.levels import DEFAULT_MAX_LEVELS
from billiardavg.spectrum.shape import DEFAULT_ALPHA, BilliardShape
from billiardavg.spectrum.unfolding import build_spectrum
from billiardavg.statistics.sample import evaluate_statistic

logger = logging.getLogger(__name__)

MAX_REJECTION_RATE = 0.5


@dataclass(frozen=True)
class PAPlan(EnsemblePlan):
    """Aspect ratios drawn from N(mean_alpha, std_alpha²), recorded in ``alphas``."""

    mean_alpha: float = DEFAULT_ALPHA
    std_alpha: float = 0.2
    n_members: int = 2000
    seed: int = 20120601
    alphas: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.n_members < 1:
            raise ConfigurationError(f"PA needs at least one member, got {self.n_members}")
        if self.std_alpha < 0:
            raise ConfigurationError(f"alpha_std must be >= 0, got {self.std_alpha}")
        if self.alphas is None:
            alphas = draw_alphas(self)
        else:
            alphas = np.array(self.alphas, dtype=float)
            if alphas.shape != (self.n_members,) or np.any(alphas <= 0):
                raise ConfigurationError(
                    f"explicit alphas must be {self.n_members} positive values"
                )
        alphas.flags.writeable = False
        object.__setattr__(self, "alphas", alphas)

    @property
    def method(self) -> Method:
        return Method.PA

    def average(self, request, grid, mode=AbscissaMode.ENERGY, **kwargs) -> StatisticCurve:
        return pa_average(request, self, grid, mode, **kwargs)


def draw_alphas(plan: PAPlan) -> np.ndarray:
    """Seeded Gaussian draws with non-positive values rejected and redrawn."""
    rng = np.random.default_rng(plan.seed)
    kept = []
    need = plan.n_members
    drawn = rejected = 0
    while need > 0:
        batch = rng.normal(plan.mean_alpha, plan.std_alpha, size=need)
        good = batch[batch > 0]
        drawn += batch.size
        rejected += batch.size - good.size
        if rejected > MAX_REJECTION_RATE * drawn:
            raise ConfigurationError(
                f"{rejected} of {drawn} aspect-ratio draws were non-positive "
                f"(mean {plan.mean_alpha:g}, std {plan.std_alpha:g}); "
                f"the ensemble is pathological"
            )
        kept.append(good)
        need -= good.size
    return np.concatenate(kept)


@dataclass(frozen=True)
class _Layout:
    requests: tuple[CurveRequest, ...]
    grid: np.ndarray
    windows: tuple[tuple[np.ndarray, np.ndarray], ...]
    span: tuple[float, float]


def _layout(stats, grid, mode: AbscissaMode, energy: Optional[float]) -> _Layout:
    requests = tuple(as_request(s) for s in stats)
    if not requests:
        raise ValueError("at least one statistic is needed")
    grid = np.asarray(grid, dtype=float)
    windows = tuple(point_windows(r, grid, mode, energy=energy) for r in requests)
    spans = [footprint(c, w) for c, w in windows]
    span = (min(lo for lo, _ in spans), max(hi for _, hi in spans))
    return _Layout(requests, grid, windows, span)


def _member_values(
    index: int, alpha: float, layout: _Layout, max_levels: int
) -> np.ndarray:
    """(n_requests, n_grid) sample values for one ensemble member."""
    try:
        spec = build_spectrum(BilliardShape(alpha), *layout.span, max_levels=max_levels)
        rows = [
            evaluate_statistic(request.kind, spec, centers, widths)
            for request, (centers, widths) in zip(layout.requests, layout.windows)
        ]
    except SpectrumRangeError as exc:
        raise SpectrumRangeError(f"PA member {index} (alpha={alpha:.6g}): {exc}") from exc
    return np.stack(rows)


def _reduce(layout: _Layout, plan: PAPlan, members: Sequence[np.ndarray]) -> list[StatisticCurve]:
    mean = np.stack(members).mean(axis=0)
    return [
        StatisticCurve(
            abscissa=layout.grid,
            mean=mean[i],
            n_members=plan.n_members,
            method=Method.PA,
            kind=request.kind,
            label=request.label,
        )
        for i, request in enumerate(layout.requests)
    ]


def pa_average_many(
    stats: Sequence,
    plan: PAPlan,
    grid,
    mode: AbscissaMode = AbscissaMode.ENERGY,
    *,
    energy: Optional[float] = None,
    max_levels: int = DEFAULT_MAX_LEVELS,
) -> list[StatisticCurve]:
    """Several statistics from one pass over the ensemble."""
    layout = _layout(stats, grid, mode, energy)
    members = [
        _member_values(i, float(alpha), layout, max_levels)
        for i, alpha in enumerate(plan.alphas)
    ]
    return _reduce(layout, plan, members)


def pa_average(
    stat,
    plan: PAPlan,
    grid,
    mode: AbscissaMode = AbscissaMode.ENERGY,
    *,
    energy: Optional[float] = None,
    max_levels: int = DEFAULT_MAX_LEVELS,
) -> StatisticCurve:
    """Ensemble mean of one statistic at fixed (ε, E) points.

    In ENERGY mode ``grid`` holds running energies; in WIDTH mode it holds
    interval widths at the fixed running ``energy``.
    """
    return pa_average_many([stat], plan, grid, mode, energy=energy, max_levels=max_levels)[0]


async def pa_average_async(
    stats: Sequence,
    plan: PAPlan,
    grid,
    mode: AbscissaMode = AbscissaMode.ENERGY,
    *,
    energy: Optional[float] = None,
    workers: int = 4,
    max_levels: int = DEFAULT_MAX_LEVELS,
) -> list[StatisticCurve]:
    """``pa_average_many`` with members fanned out over a thread pool."""
    if workers < 1:
        raise ConfigurationError(f"workers must be >= 1, got {workers}")
    layout = _layout(stats, grid, mode, energy)
    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            loop.run_in_executor(
                pool, functools.partial(_member_values, i, float(alpha), layout, max_levels)
            )
            for i, alpha in enumerate(plan.alphas)
        ]
        members = await asyncio.gather(*futures)
    logger.info("PA: %d members evaluated on %d workers", plan.n_members, workers)
    return _reduce(layout, plan, members)
