"""Per-month linear calibration of satellite GHI against ground-station GHI."""

from .core import AlignedTable, GhiSeries, Source, Unit, convert_energy_to_power, inner_join, shift_series
from .errors import DataError, NumericalError, ParseError, SatGhiError

__version__ = "0.1.0"

__all__ = [
    "AlignedTable",
    "DataError",
    "GhiSeries",
    "NumericalError",
    "ParseError",
    "SatGhiError",
    "Source",
    "Unit",
    "convert_energy_to_power",
    "inner_join",
    "shift_series",
]
