"""billiardavg - ensemble averaging for rectangular billiard spectra."""

__version__ = "0.1.0"
