from pathlib import Path

import numpy as np

from billiardavg.spectrum.levels import RawSpectrum
from billiardavg.spectrum.unfolding import UnfoldedSpectrum

SPECTRUM_HEADER = "index,raw_e,unfolded_x"


def dump_spectrum(raw: RawSpectrum, unfolded: UnfoldedSpectrum, path) -> Path:
    """Write one row per stored level: 1-based staircase rank, e, x."""
    if raw.levels.size != unfolded.levels.size:
        raise ValueError("raw and unfolded spectra hold different level counts")
    path = Path(path)
    index = raw.offset + np.arange(1, raw.levels.size + 1)
    table = np.column_stack([index, raw.levels, unfolded.levels])
    np.savetxt(
        path,
        table,
        fmt=["%d", "%.17g", "%.17g"],
        delimiter=",",
        header=SPECTRUM_HEADER,
        comments="",
        newline="\n",
    )
    return path
