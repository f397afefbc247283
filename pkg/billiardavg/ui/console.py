import logging

from rich.console import Console
from rich.logging import RichHandler
from rich.theme import Theme

theme = Theme({
    "curve": "cyan",
    "error": "red bold",
    "path": "green",
    "detail": "dim",
    "note": "italic",
    "banner": "bold blue",
})

console = Console(theme=theme)
err_console = Console(theme=theme, stderr=True)


def setup_logging(verbose: int = 0) -> None:
    """Route log records through rich on stderr: WARNING, -v INFO, -vv DEBUG."""
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, show_path=False, rich_tracebacks=True)],
        force=True,
    )
    logging.captureWarnings(True)
