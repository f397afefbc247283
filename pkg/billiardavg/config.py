import dataclasses
import math
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional

from billiardavg.errors import ConfigurationError
from billiardavg.spectrum.levels import DEFAULT_MAX_LEVELS
from billiardavg.spectrum.shape import DEFAULT_ALPHA
from billiardavg.theory.modes import POSumConfig


def _key(default, text: str):
    return field(default=default, metadata={"help": text})


@dataclass
class ExperimentConfig:
    # What to run
    experiment: str = _key("iv_rsa_pa", "experiment name (see list-experiments)")
    ensembles: Optional[str] = _key(
        None, "comma list of required ensembles, checked against the experiment"
    )
    output: str = _key("results.csv", "CSV output path")
    seed: int = _key(20120601, "seed for the aspect-ratio draws")

    # Billiard and ensembles
    alpha: float = _key(DEFAULT_ALPHA, "aspect ratio of the single SA/RSA spectrum")
    pa_alpha: Optional[float] = _key(None, "PA mean aspect ratio (none: alpha)")
    alpha_std: float = _key(0.2, "PA standard deviation of the aspect ratio")
    n_members: int = _key(2000, "PA ensemble size")
    sa_samples: int = _key(1000, "energies per SA range")
    sa_intervals: Optional[str] = _key(None, "SA intervals as lo:hi pairs, comma separated")
    sa_ranges: Optional[str] = _key(None, "SA ranges about each running energy, comma separated")
    rsa_ratio_max: float = _key(2.0, "largest RSA scale ratio c")
    rsa_samples: int = _key(1000, "number of RSA scale ratios")

    # Grids
    energy: float = _key(1e5, "running energy for curves over the interval width")
    width_min: float = _key(0.0, "smallest interval width E")
    width_max: Optional[float] = _key(None, "largest interval width E (none: 10*sqrt(energy))")
    width_count: int = _key(200, "points on the width grid")
    energy_min: Optional[float] = _key(None, "first running energy of energy grids")
    energy_max: Optional[float] = _key(None, "last running energy of energy grids")
    energy_count: Optional[int] = _key(None, "points on the energy grid")

    # Saturation window rule
    saturation_split: float = _key(1e4, "energy where the saturation window switches")
    saturation_width_low: float = _key(1e3, "saturation window at or below the split")
    saturation_width_high: float = _key(5e3, "saturation window above the split")

    # Periodic-orbit sums
    r_max: Optional[float] = _key(None, "fixed mode radius (none: adaptive)")
    r_cap: float = _key(1024.0, "largest adaptive mode radius")
    tail_tol: float = _key(1e-6, "relative convergence target of the saturation mode sum")
    sine_tol: float = _key(1e-4, "relative convergence target of the sine-squared mode sums")
    fluct_r_max: float = _key(30.0, "mode radius of staircase-fluctuation sums")
    theory_members: int = _key(200, "aspect ratios used for alpha-averaged theory")

    # Resources
    max_levels: int = _key(DEFAULT_MAX_LEVELS, "largest number of levels held per spectrum")
    workers: int = _key(4, "threads evaluating PA members")

    def __post_init__(self):
        positive = {
            "n_members": self.n_members,
            "sa_samples": self.sa_samples - 1,
            "rsa_samples": self.rsa_samples,
            "width_count": self.width_count,
            "theory_members": self.theory_members,
            "max_levels": self.max_levels,
            "workers": self.workers,
            "energy": self.energy,
            "tail_tol": self.tail_tol,
            "sine_tol": self.sine_tol,
            "fluct_r_max": self.fluct_r_max,
        }
        for name, value in positive.items():
            if not value > 0:
                raise ConfigurationError(f"{name} is out of range: {getattr(self, name)}")
        if self.rsa_ratio_max < 1.0:
            raise ConfigurationError(f"rsa_ratio_max must be >= 1, got {self.rsa_ratio_max}")
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ConfigurationError(f"alpha must be positive, got {self.alpha}")
        if self.alpha_std < 0:
            raise ConfigurationError(f"alpha_std must be >= 0, got {self.alpha_std}")

    @classmethod
    def keys(cls) -> list[dataclasses.Field]:
        return list(dataclasses.fields(cls))

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "ExperimentConfig":
        """Build a config from raw key/value pairs (strings are coerced)."""
        hints = typing.get_type_hints(cls)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigurationError(
                f"unknown config key(s) {', '.join(unknown)}; valid keys: {', '.join(sorted(known))}"
            )
        kwargs = {name: _coerce(name, value, hints[name]) for name, value in values.items()}
        return cls(**kwargs)

    @property
    def mean_alpha(self) -> float:
        return self.alpha if self.pa_alpha is None else self.pa_alpha

    @property
    def top_width(self) -> float:
        return self.width_max if self.width_max is not None else 10.0 * math.sqrt(self.energy)

    def intervals(self) -> list[tuple[float, float]]:
        out = []
        for item in _split(self.sa_intervals):
            lo, sep, hi = item.partition(":")
            if not sep:
                raise ConfigurationError(f"sa_intervals entry {item!r} is not lo:hi")
            out.append((_number("sa_intervals", lo), _number("sa_intervals", hi)))
        return out

    def ranges(self) -> list[float]:
        return [_number("sa_ranges", item) for item in _split(self.sa_ranges)]

    def required_ensembles(self) -> Optional[set[str]]:
        if self.ensembles is None:
            return None
        return {item.upper() for item in _split(self.ensembles)}

    def po_sums(self) -> POSumConfig:
        return POSumConfig(
            r_max=self.r_max,
            tail_tol=self.tail_tol,
            sine_tol=self.sine_tol,
            r_cap=self.r_cap,
            fluct_r_max=self.fluct_r_max,
        )


def _split(text: Optional[str]) -> list[str]:
    if not text:
        return []
    return [item.strip() for item in text.split(",") if item.strip()]


def _number(name: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigurationError(f"{name}: {text!r} is not a number") from None


def _coerce(name: str, value: Any, hint) -> Any:
    optional = type(None) in typing.get_args(hint)
    base = next((a for a in typing.get_args(hint) if a is not type(None)), hint)
    if isinstance(value, str):
        text = value.strip()
        if optional and text.lower() == "none":
            return None
        try:
            if base is int:
                return int(float(text)) if "e" in text.lower() else int(text)
            return base(text)
        except ValueError:
            raise ConfigurationError(
                f"{name}: cannot read {text!r} as {base.__name__}"
            ) from None
    if value is None and not optional:
        raise ConfigurationError(f"{name} may not be none")
    return value


def load_config(path) -> dict[str, str]:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    path = Path(path)
    values: dict[str, str] = {}
    for number, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigurationError(f"{path}:{number}: expected 'key = value', got {raw!r}")
        values[key.strip()] = value.strip()
    return values


def parse_overrides(items) -> dict[str, str]:
    """``--set key=value`` pairs."""
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigurationError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out
