import asyncio
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from billiardavg.averaging.base import StatisticCurve
from billiardavg.config import ExperimentConfig
from billiardavg.harness.csv_writer import emit_csv
from billiardavg.harness.events import RunEvent, RunEventKind
from billiardavg.harness.experiments import ExperimentContext, get_experiment
from billiardavg.ui.renderer import NullRenderer

logger = logging.getLogger(__name__)


@dataclass
class RunResult:
    experiment: str
    curves: list[StatisticCurve]
    path: Path
    elapsed_s: float


class ExperimentRunner:
    """Main application: config -> spectra and ensembles -> curves -> CSV."""

    def __init__(self, config: ExperimentConfig, renderer=None):
        self._config = config
        self._renderer = renderer or NullRenderer()

    async def run(self) -> RunResult:
        config = self._config
        experiment = get_experiment(config.experiment)
        started = time.perf_counter()
        logger.info("starting %s (seed %d)", experiment.name, config.seed)
        self._renderer.render(RunEvent(
            RunEventKind.STARTED,
            text=f"{experiment.name}: {experiment.description} (seed {config.seed})",
            experiment=experiment.name,
        ))

        try:
            context = ExperimentContext(config, self._renderer.render)
            curves = await experiment.build(context)
            path = emit_csv(curves, config.output)
        finally:
            self._renderer.finalize()

        elapsed = time.perf_counter() - started
        logger.info("%s: %d curves written to %s in %.1fs", experiment.name, len(curves), path, elapsed)
        self._renderer.render(RunEvent(
            RunEventKind.WRITTEN,
            experiment=experiment.name,
            path=str(path),
            elapsed_s=elapsed,
        ))
        return RunResult(experiment.name, curves, path, elapsed)


def run_experiment(config: ExperimentConfig, renderer=None) -> RunResult:
    """Run one experiment to completion and write its CSV."""
    return asyncio.run(ExperimentRunner(config, renderer).run())
