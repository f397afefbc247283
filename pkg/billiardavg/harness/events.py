from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from billiardavg.averaging.base import StatisticCurve


class RunEventKind(Enum):
    STARTED = "started"
    ENSEMBLE_DRAWN = "ensemble_drawn"
    SPECTRUM_BUILT = "spectrum_built"
    CURVE_DONE = "curve_done"
    NOTE = "note"
    WRITTEN = "written"


@dataclass
class RunEvent:
    kind: RunEventKind
    text: str = ""
    experiment: Optional[str] = None
    curve: Optional[StatisticCurve] = field(default=None, repr=False)
    n_members: Optional[int] = None
    path: Optional[str] = None
    elapsed_s: Optional[float] = None
