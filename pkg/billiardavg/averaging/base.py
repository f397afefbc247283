from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from billiardavg.statistics.sample import saturation_width
from billiardavg.statistics.window import StatisticKind


class Method(Enum):
    SA = "SA"
    RSA = "RSA"
    PA = "PA"
    THEORY = "THEORY"
    SAMPLE = "SAMPLE"


class AbscissaMode(Enum):
    """What the grid of a curve holds."""

    WIDTH = "width"     # interval widths E at a fixed running energy
    ENERGY = "energy"   # running energies ε at a fixed (or rule-based) width


@dataclass(frozen=True)
class CurveRequest:
    """One statistic to average; ``width`` is only read in ENERGY mode."""

    kind: StatisticKind
    width: Optional[object] = None
    label: str = ""


@dataclass(frozen=True)
class StatisticCurve:
    abscissa: np.ndarray
    mean: np.ndarray
    n_members: int
    method: Method
    kind: StatisticKind
    label: str = ""

    def __post_init__(self):
        if np.shape(self.abscissa) != np.shape(self.mean):
            raise ValueError(
                f"abscissa and mean differ in shape: "
                f"{np.shape(self.abscissa)} vs {np.shape(self.mean)}"
            )
        if self.n_members < 1:
            raise ValueError(f"n_members must be >= 1, got {self.n_members}")

    @property
    def column(self) -> str:
        name = f"{self.method.value}_{self.kind.value}"
        return f"{name}_{self.label}" if self.label else name

    def __len__(self) -> int:
        return int(np.size(self.abscissa))


class EnsemblePlan(ABC):
    """An averaging procedure over sample statistics."""

    @property
    @abstractmethod
    def method(self) -> Method:
        ...

    @abstractmethod
    def average(
        self,
        request: CurveRequest,
        grid,
        mode: AbscissaMode = AbscissaMode.WIDTH,
        **kwargs,
    ) -> StatisticCurve:
        ...


def point_windows(
    request: CurveRequest,
    grid: np.ndarray,
    mode: AbscissaMode,
    energy: Optional[float] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """(centres, widths) of the windows behind each grid point, before averaging."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("curve grids must be non-empty 1-d arrays")
    kind = request.kind
    if mode is AbscissaMode.WIDTH:
        if energy is None:
            raise ValueError("a fixed running energy is needed when the grid holds widths")
        return np.full(grid.shape, float(energy)), grid
    if not kind.uses_width:
        return grid, np.zeros(grid.shape)
    if request.width is None:
        if kind is StatisticKind.SAT_SR:
            return grid, saturation_width(grid)
        raise ValueError(f"{kind.value} on an energy grid needs a window width")
    return grid, np.broadcast_to(np.asarray(request.width, dtype=float), grid.shape).copy()


def footprint(centers: np.ndarray, widths: np.ndarray) -> tuple[float, float]:
    """Smallest interval holding every window."""
    return (
        float(np.min(centers - 0.5 * widths)),
        float(np.max(centers + 0.5 * widths)),
    )


def as_request(stat) -> CurveRequest:
    if isinstance(stat, CurveRequest):
        return stat
    return CurveRequest(StatisticKind(stat))
