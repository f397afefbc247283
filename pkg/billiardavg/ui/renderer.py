from rich.console import Console

from billiardavg.harness.events import RunEvent, RunEventKind
from billiardavg.ui.components import curve_line, curve_table, detail_line, written_footer


class RunRenderer:
    """Renders run events to the terminal with Rich formatting."""

    def __init__(self, console: Console):
        self._console = console
        self._curves = []

    def render(self, event: RunEvent) -> None:
        if event.kind == RunEventKind.STARTED:
            self._curves = []
            self._console.print(event.text, style="banner")

        elif event.kind in (RunEventKind.SPECTRUM_BUILT, RunEventKind.ENSEMBLE_DRAWN):
            prefix = f"{event.n_members} members, " if event.n_members else ""
            self._console.print(detail_line(prefix + event.text))

        elif event.kind == RunEventKind.CURVE_DONE:
            if event.curve is not None:
                self._curves.append(event.curve)
                self._console.print(curve_line(event.curve))

        elif event.kind == RunEventKind.NOTE:
            self._console.print(f"  {event.text}", style="note")

        elif event.kind == RunEventKind.WRITTEN:
            self._console.print(written_footer(event.path or "", event.elapsed_s or 0.0))

    def finalize(self) -> None:
        if self._curves:
            self._console.print(curve_table(self._curves))
            self._curves = []


class NullRenderer:
    """No-op renderer for --quiet runs and library use."""

    def render(self, event: RunEvent) -> None:
        pass

    def finalize(self) -> None:
        pass
