"""Registered experiments.

Each experiment is an async builder that turns an ExperimentConfig into a
list of curves on one shared abscissa grid. CPU-bound work runs in the
default executor; PA members fan out over their own thread pool.
"""

import asyncio
import functools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Awaitable, Callable, Mapping, Optional

import numpy as np

from billiardavg.averaging.base import AbscissaMode, CurveRequest, Method, StatisticCurve
from billiardavg.averaging.parametric import PAPlan, pa_average_async
from billiardavg.averaging.rescaled import RSAPlan, rsa_average
from billiardavg.averaging.spectral import SAPlan, sa_average
from billiardavg.config import ExperimentConfig
from billiardavg.errors import ConfigurationError
from billiardavg.harness.events import RunEvent, RunEventKind
from billiardavg.spectrum.shape import BilliardShape
from billiardavg.spectrum.unfolding import UnfoldedSpectrum, build_spectrum
from billiardavg.statistics.sample import evaluate_statistic, saturation_width
from billiardavg.statistics.window import StatisticKind
from billiardavg.theory.orbits import (
    alpha_averaged_fluct,
    best_shift,
    perimeter_shift,
    theory_cfss,
    theory_sample_iv,
    theory_saturation_sr,
    theory_staircase_fluct,
)

logger = logging.getLogger(__name__)

EventSink = Callable[[RunEvent], None]


class ExperimentContext:
    """Config plus the plumbing every experiment shares."""

    def __init__(self, config: ExperimentConfig, emit: Optional[EventSink] = None):
        self.config = config
        self._emit = emit or (lambda event: None)

    @property
    def shape(self) -> BilliardShape:
        return BilliardShape(self.config.alpha)

    def width_grid(self) -> np.ndarray:
        cfg = self.config
        if cfg.top_width < cfg.width_min:
            raise ConfigurationError(
                f"width grid is empty: width_max={cfg.top_width:g} < width_min={cfg.width_min:g}"
            )
        return np.linspace(cfg.width_min, cfg.top_width, cfg.width_count)

    def energy_grid(self) -> np.ndarray:
        cfg = self.config
        missing = [
            name for name in ("energy_min", "energy_max", "energy_count")
            if getattr(cfg, name) is None
        ]
        if missing:
            raise ConfigurationError(f"{cfg.experiment} needs {', '.join(missing)}")
        if not 0 < cfg.energy_min <= cfg.energy_max or cfg.energy_count < 1:
            raise ConfigurationError(
                f"bad energy grid [{cfg.energy_min:g}, {cfg.energy_max:g}] x {cfg.energy_count}"
            )
        return np.linspace(cfg.energy_min, cfg.energy_max, cfg.energy_count)

    def saturation_widths(self, energies: np.ndarray) -> np.ndarray:
        cfg = self.config
        return saturation_width(
            energies,
            split=cfg.saturation_split,
            low=cfg.saturation_width_low,
            high=cfg.saturation_width_high,
        )

    def pa_plan(self) -> PAPlan:
        cfg = self.config
        plan = PAPlan(
            mean_alpha=cfg.mean_alpha,
            std_alpha=cfg.alpha_std,
            n_members=cfg.n_members,
            seed=cfg.seed,
        )
        self._emit(RunEvent(
            RunEventKind.ENSEMBLE_DRAWN,
            text=f"alpha ~ N({plan.mean_alpha:.6g}, {plan.std_alpha:g}^2), "
                 f"sample mean {float(np.mean(plan.alphas)):.6g}",
            n_members=plan.n_members,
        ))
        return plan

    async def offload(self, fn, *args, **kwargs):
        loop = asyncio.get_running_loop()
        return await loop.run_in_executor(None, functools.partial(fn, *args, **kwargs))

    async def spectrum(self, lo: float, hi: float) -> UnfoldedSpectrum:
        spec = await self.offload(
            build_spectrum, self.shape, lo, hi, max_levels=self.config.max_levels
        )
        self._emit(RunEvent(
            RunEventKind.SPECTRUM_BUILT,
            text=f"alpha={self.config.alpha:.6g}: {spec.levels.size} levels "
                 f"for x in [{lo:.6g}, {hi:.6g}]",
        ))
        return spec

    async def pa(self, requests, grid, mode, energy=None) -> list[StatisticCurve]:
        plan = self.pa_plan()
        return await pa_average_async(
            requests,
            plan,
            grid,
            mode,
            energy=energy,
            workers=self.config.workers,
            max_levels=self.config.max_levels,
        )

    def done(self, curve: StatisticCurve) -> StatisticCurve:
        self._emit(RunEvent(RunEventKind.CURVE_DONE, curve=curve, n_members=curve.n_members))
        return curve

    def note(self, text: str) -> None:
        logger.info(text)
        self._emit(RunEvent(RunEventKind.NOTE, text=text))


def theory_curve(grid, values, kind: StatisticKind, label: str = "") -> StatisticCurve:
    return StatisticCurve(grid, np.asarray(values, dtype=float), 1, Method.THEORY, kind, label)


def sample_curve(grid, values, kind: StatisticKind, label: str = "") -> StatisticCurve:
    return StatisticCurve(grid, np.asarray(values, dtype=float), 1, Method.SAMPLE, kind, label)


def _range_label(value: float) -> str:
    return f"range{value:g}"


# ── Staircase fluctuation ──

async def fluct_sa(ctx: ExperimentContext) -> list[StatisticCurve]:
    cfg = ctx.config
    grid = ctx.energy_grid()
    ranges = ctx.config.ranges()
    if not ranges:
        raise ConfigurationError("fluct_sa needs at least one SA range (sa_ranges)")
    reach = 0.5 * max(ranges)
    spec = await ctx.spectrum(grid.min() - reach, grid.max() + reach)
    po = cfg.po_sums()

    curves = [ctx.done(sample_curve(
        grid, evaluate_statistic(StatisticKind.FLUCT, spec, grid), StatisticKind.FLUCT
    ))]
    for span in ranges:
        plan = SAPlan(center=float(grid[0]), span=span, n_samples=cfg.sa_samples, shape=ctx.shape)
        label = _range_label(span)
        request = CurveRequest(StatisticKind.FLUCT, label=label)
        curves.append(ctx.done(await ctx.offload(
            sa_average, request, plan, grid, AbscissaMode.ENERGY, spectrum=spec
        )))
        sampled = grid[:, None] + plan.offsets[None, :]
        values = await ctx.offload(theory_staircase_fluct, sampled, cfg.alpha, po)
        curves.append(ctx.done(theory_curve(grid, values.mean(axis=1), StatisticKind.FLUCT, label)))
    return curves


async def fluct_pa(ctx: ExperimentContext) -> list[StatisticCurve]:
    cfg = ctx.config
    grid = ctx.energy_grid()
    po = cfg.po_sums()
    plan = ctx.pa_plan()
    [numeric] = await pa_average_async(
        [StatisticKind.FLUCT], plan, grid, AbscissaMode.ENERGY,
        workers=cfg.workers, max_levels=cfg.max_levels,
    )
    curves = [ctx.done(numeric)]

    alphas = plan.alphas[: cfg.theory_members]
    shift = perimeter_shift(float(grid.mean()))
    step = (grid[1] - grid[0]) / 2.0 if grid.size > 1 else 1.0
    dense = np.arange(grid.min(), grid.max() + 2.0 * shift + step, step)
    with_phase = await ctx.offload(alpha_averaged_fluct, dense, alphas, po, True)
    no_phase = await ctx.offload(alpha_averaged_fluct, dense, alphas, po, False)

    def on_grid(values, offset=0.0):
        return np.interp(grid + offset, dense, values)

    curves.append(ctx.done(theory_curve(grid, on_grid(with_phase), StatisticKind.FLUCT)))
    curves.append(ctx.done(theory_curve(grid, on_grid(no_phase), StatisticKind.FLUCT, "nophase")))
    curves.append(ctx.done(
        theory_curve(grid, on_grid(with_phase, shift), StatisticKind.FLUCT, "shifted")
    ))

    if grid.size > 2:
        shifts = np.arange(0.0, 2.0 * shift, step)
        best, corr = best_shift(grid, numeric.mean, lambda e: np.interp(e, dense, with_phase), shifts)
        _, corr_np = best_shift(grid, numeric.mean, lambda e: np.interp(e, dense, no_phase), shifts)
        ctx.note(
            f"best leftward shift {best:.1f} (perimeter estimate {shift:.1f}); "
            f"peak correlation {corr.max():.3f} with phase, {corr_np.max():.3f} without"
        )
    return curves


# ── Interval number variance and CFSS ──

async def iv_sa(ctx: ExperimentContext) -> list[StatisticCurve]:
    cfg = ctx.config
    grid = ctx.width_grid()
    intervals = cfg.intervals()
    if not intervals:
        raise ConfigurationError("iv_sa needs at least one SA interval (sa_intervals)")
    half = 0.5 * grid.max()
    spec = await ctx.spectrum(
        min(lo for lo, _ in intervals) - half, max(hi for _, hi in intervals) + half
    )
    curves = []
    for lo, hi in intervals:
        plan = SAPlan.from_interval(lo, hi, cfg.sa_samples, ctx.shape)
        request = CurveRequest(StatisticKind.IV, label=f"{lo:g}-{hi:g}")
        curves.append(ctx.done(await ctx.offload(
            sa_average, request, plan, grid, AbscissaMode.WIDTH, spectrum=spec
        )))
    values = await ctx.offload(theory_sample_iv, cfg.energy, grid, cfg.alpha, cfg.po_sums())
    curves.append(ctx.done(theory_curve(grid, values, StatisticKind.IV)))
    return curves


async def _rsa_pa_over_width(ctx: ExperimentContext, kind: StatisticKind, theory) -> list:
    cfg = ctx.config
    grid = ctx.width_grid()
    plan = RSAPlan.uniform(cfg.energy, cfg.rsa_ratio_max, cfg.rsa_samples, ctx.shape)
    top = plan.scale_ratios.max()
    half = 0.5 * grid.max()
    spec = await ctx.spectrum(cfg.energy - half, cfg.energy * top + math.sqrt(top) * half)

    curves = [ctx.done(await ctx.offload(
        rsa_average, kind, plan, grid, AbscissaMode.WIDTH, spectrum=spec
    ))]
    [pa] = await ctx.pa([kind], grid, AbscissaMode.WIDTH, energy=cfg.energy)
    curves.append(ctx.done(pa))

    po = cfg.po_sums()
    values = await ctx.offload(theory, cfg.energy, grid, cfg.alpha, po)
    curves.append(ctx.done(theory_curve(grid, values, kind)))
    if cfg.mean_alpha != cfg.alpha:
        values = await ctx.offload(theory, cfg.energy, grid, cfg.mean_alpha, po)
        curves.append(ctx.done(theory_curve(grid, values, kind, "pa")))
    return curves


async def iv_rsa_pa(ctx: ExperimentContext) -> list[StatisticCurve]:
    return await _rsa_pa_over_width(ctx, StatisticKind.IV, theory_sample_iv)


async def cfss_rsa_pa(ctx: ExperimentContext) -> list[StatisticCurve]:
    return await _rsa_pa_over_width(ctx, StatisticKind.CFSS, theory_cfss)


# ── Saturation rigidity and global variance ──

async def _saturation_theory(ctx: ExperimentContext, grid: np.ndarray) -> list[StatisticCurve]:
    cfg = ctx.config
    po = cfg.po_sums()
    curves = [theory_curve(
        grid, await ctx.offload(theory_saturation_sr, grid, cfg.alpha, po), StatisticKind.SAT_SR
    )]
    if cfg.mean_alpha != cfg.alpha:
        curves.append(theory_curve(
            grid,
            await ctx.offload(theory_saturation_sr, grid, cfg.mean_alpha, po),
            StatisticKind.SAT_SR,
            "pa",
        ))
    return [ctx.done(c) for c in curves]


async def satsr_rsa_pa(ctx: ExperimentContext) -> list[StatisticCurve]:
    cfg = ctx.config
    grid = ctx.energy_grid()
    widths = ctx.saturation_widths(grid)
    request = CurveRequest(StatisticKind.SAT_SR, width=widths)

    plan = RSAPlan.uniform(float(grid[0]), cfg.rsa_ratio_max, cfg.rsa_samples, ctx.shape)
    top = plan.scale_ratios.max()
    spec = await ctx.spectrum(
        float(np.min(grid - 0.5 * widths)),
        float(np.max(grid * top + 0.5 * math.sqrt(top) * widths)),
    )
    curves = [ctx.done(await ctx.offload(
        rsa_average, request, plan, grid, AbscissaMode.ENERGY, spectrum=spec
    ))]
    [pa] = await ctx.pa([request], grid, AbscissaMode.ENERGY)
    curves.append(ctx.done(pa))
    return curves + await _saturation_theory(ctx, grid)


async def satsr_sa_pa(ctx: ExperimentContext) -> list[StatisticCurve]:
    cfg = ctx.config
    grid = ctx.energy_grid()
    widths = ctx.saturation_widths(grid)
    ranges = cfg.ranges()
    if not ranges:
        raise ConfigurationError("satsr_sa_pa needs at least one SA range (sa_ranges)")
    reach = 0.5 * max(ranges) + 0.5 * widths
    spec = await ctx.spectrum(float(np.min(grid - reach)), float(np.max(grid + reach)))

    curves = []
    for span in ranges:
        plan = SAPlan(center=float(grid[0]), span=span, n_samples=cfg.sa_samples, shape=ctx.shape)
        request = CurveRequest(StatisticKind.SAT_SR, width=widths, label=_range_label(span))
        curves.append(ctx.done(await ctx.offload(
            sa_average, request, plan, grid, AbscissaMode.ENERGY, spectrum=spec
        )))
    sample = await ctx.offload(evaluate_statistic, StatisticKind.SAT_SR, spec, grid, widths)
    curves.append(ctx.done(sample_curve(grid, sample, StatisticKind.SAT_SR)))
    [pa] = await ctx.pa([CurveRequest(StatisticKind.SAT_SR, width=widths)], grid, AbscissaMode.ENERGY)
    curves.append(ctx.done(pa))
    return curves + await _saturation_theory(ctx, grid)


async def gv_pa(ctx: ExperimentContext) -> list[StatisticCurve]:
    """PA of GV against PA saturation SR; SA of GV over ω collapses onto SR(ω)."""
    cfg = ctx.config
    grid = ctx.energy_grid()
    widths = ctx.saturation_widths(grid)
    pa_gv, pa_sat = await ctx.pa(
        [StatisticKind.GV, CurveRequest(StatisticKind.SAT_SR, width=widths)],
        grid,
        AbscissaMode.ENERGY,
    )
    curves = [ctx.done(pa_gv), ctx.done(pa_sat)]

    spec = await ctx.spectrum(float(np.min(grid - widths)), float(np.max(grid + widths)))
    sa_mean = np.empty(grid.shape)
    for omega in np.unique(widths):
        mask = widths == omega
        plan = SAPlan(center=float(grid[mask][0]), span=float(omega),
                      n_samples=cfg.sa_samples, shape=ctx.shape)
        part = await ctx.offload(
            sa_average, StatisticKind.GV, plan, grid[mask], AbscissaMode.ENERGY, spectrum=spec
        )
        sa_mean[mask] = part.mean
    curves.append(ctx.done(
        StatisticCurve(grid, sa_mean, cfg.sa_samples, Method.SA, StatisticKind.GV)
    ))
    sample = await ctx.offload(evaluate_statistic, StatisticKind.SR, spec, grid, widths)
    curves.append(ctx.done(sample_curve(grid, sample, StatisticKind.SR)))
    return curves


# ── Registry ──

@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    ensembles: tuple[Method, ...]
    theory: bool
    mode: AbscissaMode
    build: Callable[[ExperimentContext], Awaitable[list[StatisticCurve]]]
    defaults: Mapping[str, Any] = field(default_factory=dict)


_FLUCT_GRID = {"energy_min": 10000.0, "energy_max": 11000.0, "energy_count": 1001}
_WIDE_GRID = {"energy_min": 1e3, "energy_max": 1e5}

EXPERIMENTS: dict[str, Experiment] = {
    e.name: e
    for e in (
        Experiment(
            "fluct_sa", "staircase fluctuation under SA, ranges 1e2 and 1e3",
            (Method.SA,), True, AbscissaMode.ENERGY, fluct_sa,
            {**_FLUCT_GRID, "sa_ranges": "100,1000"},
        ),
        Experiment(
            "fluct_pa", "staircase fluctuation under PA about alpha = 1",
            (Method.PA,), True, AbscissaMode.ENERGY, fluct_pa,
            {**_FLUCT_GRID, "pa_alpha": 1.0},
        ),
        Experiment(
            "iv_sa", "interval variance under SA over two energy intervals",
            (Method.SA,), True, AbscissaMode.WIDTH, iv_sa,
            {"sa_intervals": "90500:100500,75000:125000"},
        ),
        Experiment(
            "iv_rsa_pa", "interval variance under RSA and PA",
            (Method.RSA, Method.PA), True, AbscissaMode.WIDTH, iv_rsa_pa,
        ),
        Experiment(
            "cfss_rsa_pa", "staircase-fluctuation correlation under RSA and PA",
            (Method.RSA, Method.PA), True, AbscissaMode.WIDTH, cfss_rsa_pa,
        ),
        Experiment(
            "satsr_rsa_pa", "saturation rigidity under RSA and PA",
            (Method.RSA, Method.PA), True, AbscissaMode.ENERGY, satsr_rsa_pa,
            {**_WIDE_GRID, "energy_count": 50},
        ),
        Experiment(
            "satsr_sa_pa", "saturation rigidity under SA (ranges 1e4, 5e4) and PA",
            (Method.SA, Method.PA), True, AbscissaMode.ENERGY, satsr_sa_pa,
            {"energy_min": 3e4, "energy_max": 1e5, "energy_count": 50,
             "sa_ranges": "10000,50000"},
        ),
        Experiment(
            "gv_pa", "global variance under PA against saturation rigidity",
            (Method.PA, Method.SA), False, AbscissaMode.ENERGY, gv_pa,
            {**_WIDE_GRID, "energy_count": 100},
        ),
    )
}


def get_experiment(name: str) -> Experiment:
    try:
        return EXPERIMENTS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown experiment {name!r}; valid experiments: {', '.join(EXPERIMENTS)}"
        ) from None


def resolve_config(
    name: str,
    file_values: Optional[Mapping[str, Any]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> ExperimentConfig:
    """Dataclass defaults < experiment defaults < file keys < overrides."""
    experiment = get_experiment(name)
    values = {**experiment.defaults, **(file_values or {}), **(overrides or {})}
    values["experiment"] = name
    config = ExperimentConfig.from_mapping(values)

    required = config.required_ensembles()
    expected = {m.value for m in experiment.ensembles}
    if required is not None and required != expected:
        raise ConfigurationError(
            f"experiment {name} averages with {', '.join(sorted(expected))}, "
            f"but the config requires {', '.join(sorted(required))}"
        )
    return config
