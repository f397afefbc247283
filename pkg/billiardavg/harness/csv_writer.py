from pathlib import Path
from typing import Sequence

import numpy as np

from billiardavg.averaging.base import StatisticCurve
from billiardavg.errors import CurveMismatchError


def csv_header(curves: Sequence[StatisticCurve]) -> str:
    return ",".join(["abscissa"] + [curve.column for curve in curves])


def emit_csv(curves: Sequence[StatisticCurve], path) -> Path:
    """One row per grid point: the abscissa, then each curve's mean.

    Values are written with 17 significant digits so a parse recovers them
    exactly; lines end in LF.
    """
    if not curves:
        raise CurveMismatchError("no curves to write")
    grid = np.asarray(curves[0].abscissa, dtype=float)
    for curve in curves[1:]:
        other = np.asarray(curve.abscissa, dtype=float)
        if other.shape != grid.shape or not np.array_equal(other, grid):
            raise CurveMismatchError(
                f"curve {curve.column} is on a different grid than {curves[0].column}"
            )
    columns = [curve.column for curve in curves]
    duplicated = sorted({c for c in columns if columns.count(c) > 1})
    if duplicated:
        raise CurveMismatchError(f"duplicate column names: {', '.join(duplicated)}")

    path = Path(path)
    table = np.column_stack([grid] + [np.asarray(c.mean, dtype=float) for c in curves])
    np.savetxt(
        path,
        table,
        fmt="%.17g",
        delimiter=",",
        header=csv_header(curves),
        comments="",
        newline="\n",
    )
    return path
