"""Vulnerability index maps and class-area summaries."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from gwvuln.classification import ClassBreaks, classify, jenks_breaks
from gwvuln.grid import Grid, HeaderMismatchError, weighted_sum
from gwvuln.tables import DRASTIC_LU_PARAMETERS, DRASTIC_PARAMETERS

SCHEMES = ("drastic", "drastic_lu", "ahp_lu", "fuzzy_ahp_lu")


def scheme_parameters(scheme: str) -> tuple:
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    return DRASTIC_PARAMETERS if scheme == "drastic" else DRASTIC_LU_PARAMETERS


@dataclass(frozen=True)
class IndexModel:
    """Rating layers plus one weight per parameter for a given scheme.

    Weights may be the integer DRASTIC weights or a normalised weight vector;
    both give the same class map when proportional.
    """

    scheme: str
    weights: Sequence[float]
    rating_layers: Mapping[str, Grid]

    def __post_init__(self):
        params = scheme_parameters(self.scheme)
        w = tuple(float(x) for x in self.weights)
        if len(w) != len(params):
            raise ValueError(f"{self.scheme} needs {len(params)} weights, got {len(w)}")
        missing = [p for p in params if p not in self.rating_layers]
        if missing:
            raise ValueError(f"{self.scheme}: missing rating layer(s) {', '.join(missing)}")
        ref = self.rating_layers[params[0]].header
        for p in params[1:]:
            h = self.rating_layers[p].header
            if h != ref:
                raise HeaderMismatchError(f"layer {p} differs from {params[0]} in: {', '.join(ref.diff(h))}")
        object.__setattr__(self, "weights", w)

    @property
    def parameters(self) -> tuple:
        return scheme_parameters(self.scheme)


VI_SIGNIFICANT_DIGITS = 12


def _snap(v: np.ndarray, digits: int = VI_SIGNIFICANT_DIGITS) -> np.ndarray:
    """Round to ``digits`` significant digits.

    Normalised weights are inexact in binary, so combinations whose index is
    equal in real arithmetic can differ by an ulp; snapping restores the ties
    so that proportional weight vectors rank cells identically.
    """
    out = v.copy()
    nz = v != 0
    scale = 10.0 ** (digits - 1 - np.floor(np.log10(np.abs(v[nz]))))
    out[nz] = np.round(v[nz] * scale) / scale
    return out


def compute_index(model: IndexModel) -> Grid:
    vi = weighted_sum([(model.rating_layers[p], w) for p, w in zip(model.parameters, model.weights)])
    mask = vi.mask
    return Grid.from_masked(vi.header, _snap(np.where(mask, vi.values, 0.0)), mask)


@dataclass(frozen=True)
class VulnerabilityMap:
    scheme: str
    vi: Grid
    classes: Grid
    breaks: ClassBreaks


def build_vulnerability_map(model: IndexModel, k: int = 5) -> VulnerabilityMap:
    vi = compute_index(model)
    breaks = jenks_breaks(vi.valid_values(), k)
    return VulnerabilityMap(model.scheme, vi, classify(vi, breaks), breaks)


class ClassArea(NamedTuple):
    class_id: int
    cells: int
    percent: float


@dataclass(frozen=True)
class AreaSummary:
    rows: tuple
    n_valid: int

    @property
    def empty(self) -> bool:
        return self.n_valid == 0


def class_area_summary(classes: Grid, k: int | None = None) -> AreaSummary:
    """Cell count and share of valid cells per class id.

    With ``k`` given, every class ``1..k`` is listed even when empty.
    """
    vals = classes.valid_values().astype(np.int64)
    n = int(vals.size)
    if n == 0:
        return AreaSummary((), 0)
    ids = range(1, k + 1) if k else np.unique(vals).tolist()
    counts = np.bincount(vals, minlength=(max(ids) + 1))
    rows = tuple(ClassArea(int(c), int(counts[c]), 100.0 * counts[c] / n) for c in ids)
    return AreaSummary(rows, n)
