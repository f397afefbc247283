import math
from dataclasses import dataclass

# Golden-ratio offset from the square keeps the default spectrum free of
# systematic degeneracies.
DEFAULT_ALPHA = 1.0 - (math.sqrt(5.0) - 1.0) / 20.0


@dataclass(frozen=True)
class BilliardShape:
    """Rectangular billiard of fixed area, described by α = a²/b².

    Energies are measured in units of the mean level spacing, so the aspect
    ratio is the only parameter that survives into any formula.
    """

    aspect_ratio: float = DEFAULT_ALPHA

    def __post_init__(self):
        if not (math.isfinite(self.aspect_ratio) and self.aspect_ratio > 0):
            raise ValueError(
                f"aspect_ratio must be positive and finite, got {self.aspect_ratio}"
            )

    @property
    def perimeter_coeff(self) -> float:
        """Weyl perimeter coefficient c(α) = (α^¼ + α^-¼)/√π."""
        q = self.aspect_ratio ** 0.25
        return (q + 1.0 / q) / math.sqrt(math.pi)

    def inverted(self) -> "BilliardShape":
        return BilliardShape(1.0 / self.aspect_ratio)
