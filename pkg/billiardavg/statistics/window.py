from dataclasses import dataclass
from enum import Enum


class StatisticKind(Enum):
    IV = "IV"
    GV = "GV"
    SR = "SR"
    SAT_SR = "SAT_SR"
    CFSS = "CFSS"
    FLUCT = "FLUCT"

    @property
    def uses_width(self) -> bool:
        return self not in (StatisticKind.GV, StatisticKind.FLUCT)

    @property
    def non_negative(self) -> bool:
        return self not in (StatisticKind.CFSS, StatisticKind.FLUCT)


@dataclass(frozen=True)
class Window:
    """Interval of width E centred on the running energy ε."""

    center: float
    width: float = 0.0

    def __post_init__(self):
        if self.width < 0:
            raise ValueError(f"window width must be >= 0, got {self.width}")

    @property
    def lower(self) -> float:
        return self.center - 0.5 * self.width

    @property
    def upper(self) -> float:
        return self.center + 0.5 * self.width


@dataclass(frozen=True)
class SampleStatistic:
    """One statistic of one spectrum over one window."""

    kind: StatisticKind
    value: float
    window: Window

    def __post_init__(self):
        if self.kind.non_negative and self.value < 0:
            raise ValueError(f"{self.kind.value} cannot be negative, got {self.value}")
