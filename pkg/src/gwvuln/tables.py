"""Published DRASTIC / DRASTIC-LU reference data.

Continuous ranges are stored ascending. Categorical parameters use integer
codes numbered 1.. in the order listed here (most vulnerable first), which
is the legend expected in categorical input grids.
"""
from __future__ import annotations

from gwvuln.classification import CategoryEntry, IntervalEntry, RatingScheme

DRASTIC_PARAMETERS = ("D", "R", "A", "S", "T", "I", "C")
DRASTIC_LU_PARAMETERS = DRASTIC_PARAMETERS + ("LU",)

PARAMETER_NAMES = {
    "D": "depth to water (m)",
    "R": "net recharge (mm/year)",
    "A": "aquifer media",
    "S": "soil media",
    "T": "topographic slope (%)",
    "I": "impact of the vadose zone",
    "C": "hydraulic conductivity (m/s)",
    "LU": "land use",
}

DRASTIC_WEIGHTS = {"D": 5, "R": 4, "A": 3, "S": 2, "T": 1, "I": 5, "C": 3, "LU": 5}

# Normalised AHP weights as printed (rounded to 4 decimals).
PUBLISHED_AHP_WEIGHTS = (0.1786, 0.1429, 0.1071, 0.0714, 0.0357, 0.1786, 0.1071, 0.1786)
PUBLISHED_FUZZY_AHP_WEIGHTS = (0.1233, 0.1169, 0.1142, 0.1207, 0.1640, 0.1233, 0.1142, 0.1233)

RI_8 = 1.41

_INTERVALS = {
    "D": [(5.70, 17.90, 10), (17.90, 30.10, 8), (30.10, 42.30, 6), (42.30, 54.50, 4), (54.50, 66.50, 2)],
    "R": [(42.0, 100.0, 3), (100.0, 160.0, 4), (160.0, 220.0, 7), (220.0, 300.0, 8), (300.0, 390.0, 10)],
    "T": [(0.0, 2.0, 10), (2.0, 6.0, 8), (6.0, 11.50, 6), (11.50, 19.50, 4), (19.50, 40.50, 2)],
    "C": [(2.96e-05, 1.06e-04, 2), (1.06e-04, 1.84e-04, 4), (1.84e-04, 2.61e-04, 6),
          (2.61e-04, 3.38e-04, 8), (3.38e-04, 4.15e-04, 10)],
}

_CATEGORIES = {
    "A": [("Sand / Gravel", 8), ("Sand and Clay", 6), ("Limestone and Sandstone", 4), ("Silty Clay", 2)],
    "S": [("Pebble_Gravel_Sand", 10), ("Gravel and Clay", 8), ("Sand and Clay", 6),
          ("Sandy Clay", 4), ("Sandy Clay Loam", 3)],
    "I": [("Pebble-Gravel-sand", 10), ("Sandy Loam", 8),
          ("Sandy Clay, Clayey Sand, Silt Loam, Loam", 6), ("Clay Loam", 4), ("Clay and Silty Clay", 2)],
    "LU": [("Urban and Residential Areas", 10), ("New agricultural Areas", 9),
           ("Wastewater-Impacted Areas", 7), ("Old agricultural Areas", 3), ("Barren land", 1)],
}


def rating_scheme(parameter: str) -> RatingScheme:
    """Standard rating scheme and integer weight for one parameter."""
    w = DRASTIC_WEIGHTS[parameter]
    if parameter in _INTERVALS:
        entries = tuple(IntervalEntry(lo, hi, r) for lo, hi, r in _INTERVALS[parameter])
        return RatingScheme(parameter, "continuous", entries, w)
    entries = tuple(CategoryEntry(code, label, r)
                    for code, (label, r) in enumerate(_CATEGORIES[parameter], start=1))
    return RatingScheme(parameter, "categorical", entries, w)


def standard_schemes() -> dict[str, RatingScheme]:
    return {p: rating_scheme(p) for p in DRASTIC_LU_PARAMETERS}


def standard_priorities() -> tuple[int, ...]:
    """Priority vector whose ratio matrix is the published AHP comparison matrix."""
    return tuple(DRASTIC_WEIGHTS[p] for p in DRASTIC_LU_PARAMETERS)


# Fuzzy comparison matrix exactly as printed: rows/cols D R A S T I C LU.
_R1 = [(1.00, 1.00, 1.00), (1.25, 0.80, 1.00), (1.67, 0.60, 1.00), (2.50, 0.40, 1.00),
       (5.00, 0.20, 1.00), (1.00, 1.00, 1.00), (1.67, 0.60, 1.00), (1.00, 1.00, 1.00)]
_R2 = [(0.80, 1.25, 1.00), (1.00, 1.00, 1.00), (1.33, 0.75, 1.00), (2.00, 0.50, 1.00),
       (4.00, 0.25, 1.00), (0.80, 1.25, 1.00), (1.33, 0.75, 1.00), (0.80, 1.25, 1.00)]
_R3 = [(0.60, 1.67, 1.00), (0.75, 1.33, 1.00), (1.00, 1.00, 1.00), (1.50, 0.67, 1.00),
       (3.00, 0.33, 1.00), (0.60, 1.67, 1.00), (1.00, 1.00, 1.00), (0.60, 1.67, 1.00)]
_R4 = [(0.40, 2.50, 1.00), (0.50, 2.00, 1.00), (0.67, 1.50, 1.00), (1.00, 1.00, 1.00),
       (2.00, 0.50, 1.00), (0.40, 2.50, 1.00), (0.67, 1.50, 1.00), (0.40, 2.50, 1.00)]
_R5 = [(0.20, 5.00, 1.00), (0.25, 4.00, 1.00), (0.33, 3.00, 1.00), (0.50, 2.00, 1.00),
       (1.00, 1.00, 1.00), (0.20, 5.00, 1.00), (0.33, 3.00, 1.00), (0.20, 5.00, 1.00)]

STANDARD_FUZZY_MATRIX = (_R1, _R2, _R3, _R4, _R5, _R1, _R3, _R1)
