from typing import Iterable, Sequence

import numpy as np
from rich.table import Table
from rich.text import Text

from billiardavg.averaging.base import StatisticCurve
from billiardavg.statistics.window import SampleStatistic


def detail_line(text: str) -> Text:
    return Text(f"  {text}", style="detail")


def curve_line(curve: StatisticCurve) -> Text:
    """One-line summary of a finished curve."""
    mean = np.asarray(curve.mean)
    line = Text("  ")
    line.append(curve.column, style="curve")
    line.append(
        f"  {len(curve)} points, {curve.n_members} members, "
        f"range [{mean.min():.6g}, {mean.max():.6g}]",
        style="detail",
    )
    return line


def curve_table(curves: Sequence[StatisticCurve]) -> Table:
    table = Table(title="Curves", show_lines=False)
    table.add_column("column", style="curve")
    table.add_column("members", justify="right")
    table.add_column("first", justify="right")
    table.add_column("last", justify="right")
    table.add_column("mean", justify="right")
    for curve in curves:
        mean = np.asarray(curve.mean)
        table.add_row(
            curve.column,
            str(curve.n_members),
            f"{mean[0]:.6g}",
            f"{mean[-1]:.6g}",
            f"{mean.mean():.6g}",
        )
    return table


def experiment_table(experiments: Iterable) -> Table:
    table = Table(title="Experiments")
    table.add_column("name", style="curve")
    table.add_column("ensembles")
    table.add_column("abscissa")
    table.add_column("theory")
    table.add_column("description")
    for e in experiments:
        table.add_row(
            e.name,
            ",".join(m.value for m in e.ensembles),
            "E" if e.mode.value == "width" else "epsilon",
            "yes" if e.theory else "no",
            e.description,
        )
    return table


def config_key_table(fields: Iterable) -> Table:
    table = Table(title="Config keys")
    table.add_column("key", style="curve")
    table.add_column("default", justify="right")
    table.add_column("meaning")
    for f in fields:
        default = "none" if f.default is None else f"{f.default:g}" if isinstance(
            f.default, float
        ) else str(f.default)
        table.add_row(f.name, default, f.metadata.get("help", ""))
    return table


def written_footer(path: str, elapsed_s: float) -> Text:
    line = Text("wrote ")
    line.append(path, style="path")
    line.append(f" in {elapsed_s:.1f}s", style="detail")
    return line



def statistic_table(stats: Iterable[SampleStatistic]) -> Table:
    table = Table(title="Sample statistics")
    table.add_column("statistic", style="curve")
    table.add_column("centre", justify="right")
    table.add_column("width", justify="right")
    table.add_column("value", justify="right")
    for s in stats:
        table.add_row(s.kind.value, f"{s.window.center:g}", f"{s.window.width:g}", f"{s.value:.6g}")
    return table
