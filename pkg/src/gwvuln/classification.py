"""Parameter rating and Jenks natural-breaks classification."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from gwvuln.grid import Grid

log = logging.getLogger(__name__)

DEFAULT_LABELS = {
    1: ("all",),
    2: ("low", "high"),
    3: ("low", "moderate", "high"),
    4: ("low", "moderate", "high", "very high"),
    5: ("very low", "low", "moderate", "high", "very high"),
}


class IntervalEntry(NamedTuple):
    lower: float
    upper: float
    rating: float


class CategoryEntry(NamedTuple):
    code: int
    label: str
    rating: float


@dataclass(frozen=True)
class RatingScheme:
    """Ratings for one parameter plus its integer weight.

    Continuous intervals are closed below and open above, except the last,
    which is closed on both ends. Adjacent intervals must share endpoints.
    """

    parameter: str
    mode: str
    entries: tuple
    weight: float

    def __post_init__(self):
        if self.mode not in ("continuous", "categorical"):
            raise ValueError(f"mode must be 'continuous' or 'categorical', got {self.mode!r}")
        if not self.entries:
            raise ValueError(f"rating scheme for {self.parameter} has no entries")
        if not self.weight > 0:
            raise ValueError("weight must be positive")
        for e in self.entries:
            if not 1 <= e.rating <= 10:
                raise ValueError(f"{self.parameter}: rating {e.rating} outside [1, 10]")
        if self.mode == "continuous":
            entries = tuple(IntervalEntry(*e) for e in self.entries)
            for e in entries:
                if not e.lower < e.upper:
                    raise ValueError(f"{self.parameter}: empty interval {e.lower}-{e.upper}")
            for a, b in zip(entries, entries[1:]):
                if b.lower != a.upper:
                    raise ValueError(
                        f"{self.parameter}: intervals not contiguous at {a.upper} / {b.lower}"
                    )
        else:
            entries = tuple(CategoryEntry(*e) for e in self.entries)
            codes = [e.code for e in entries]
            if len(set(codes)) != len(codes):
                raise ValueError(f"{self.parameter}: duplicate category codes")
        object.__setattr__(self, "entries", entries)

    def rate(self, values: np.ndarray) -> np.ndarray:
        """Ratings for an array of values; NaN where no entry matches."""
        values = np.asarray(values, dtype=np.float64)
        out = np.full(values.shape, np.nan)
        if self.mode == "continuous":
            lowers = np.array([e.lower for e in self.entries])
            ratings = np.array([e.rating for e in self.entries], dtype=np.float64)
            idx = np.searchsorted(lowers, values, side="right") - 1
            last = self.entries[-1]
            ok = (idx >= 0) & (values <= last.upper)
            out[ok] = ratings[idx[ok]]
        else:
            for e in self.entries:
                out[values == e.code] = e.rating
        return out

    def to_dict(self) -> dict:
        return {
            "parameter": self.parameter,
            "mode": self.mode,
            "weight": self.weight,
            "entries": [e._asdict() for e in self.entries],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RatingScheme":
        mode = d["mode"]
        if mode == "continuous":
            entries = tuple(IntervalEntry(e["lower"], e["upper"], e["rating"]) for e in d["entries"])
        else:
            entries = tuple(CategoryEntry(int(e["code"]), e.get("label", ""), e["rating"])
                            for e in d["entries"])
        return cls(d["parameter"], mode, entries, d["weight"])


class RatedGrid(NamedTuple):
    grid: Grid
    n_unrated: int


def apply_rating(g: Grid, scheme: RatingScheme) -> RatedGrid:
    """Replace each valid cell by its rating.

    Cells matching no interval or category become nodata and are counted in
    ``n_unrated``.
    """
    mask = g.mask
    rated = scheme.rate(g.values)
    hit = mask & ~np.isnan(rated)
    n_unrated = int(mask.sum() - hit.sum())
    if n_unrated:
        log.warning("%s: %d cell(s) outside every rating entry set to nodata",
                    scheme.parameter, n_unrated)
    return RatedGrid(Grid.from_masked(g.header, np.nan_to_num(rated), hit), n_unrated)


@dataclass(frozen=True)
class ClassBreaks:
    """Upper bounds of classes ``1..k-1``; class ``k`` is open-ended above."""

    breaks: tuple
    k: int
    labels: tuple = field(default=())

    def __post_init__(self):
        breaks = tuple(float(b) for b in self.breaks)
        if len(breaks) != self.k - 1:
            raise ValueError(f"{self.k} classes need {self.k - 1} breaks, got {len(breaks)}")
        if any(b >= c for b, c in zip(breaks, breaks[1:])):
            raise ValueError("breaks must be strictly increasing")
        labels = tuple(self.labels) or default_labels(self.k)
        if len(labels) != self.k:
            raise ValueError("need one label per class")
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "labels", labels)


def default_labels(k: int) -> tuple:
    return DEFAULT_LABELS.get(k, tuple(f"class {i}" for i in range(1, k + 1)))


def _sorted_distinct(values):
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size == 0:
        raise ValueError("no values to classify")
    if not np.isfinite(v).all():
        raise ValueError("values must be finite")
    return np.unique(v, return_counts=True)


def within_class_ssd(values: Sequence[float], breaks: Sequence[float]) -> float:
    """Total within-class sum of squared deviations for given breaks."""
    v = np.asarray(values, dtype=np.float64).ravel()
    cls = np.searchsorted(np.asarray(breaks, dtype=np.float64), v, side="left")
    total = 0.0
    for c in np.unique(cls):
        x = v[cls == c]
        total += float(((x - x.mean()) ** 2).sum())
    return total


def jenks_breaks(values, k: int = 5, labels: Sequence[str] = ()) -> ClassBreaks:
    """Fisher-Jenks optimal breaks by exact dynamic programming.

    The DP runs over distinct values weighted by multiplicity (an optimal
    partition never separates equal values). Among equal-cost partitions the
    one with the lexicographically smallest split positions is returned.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    u, counts = _sorted_distinct(values)
    m = len(u)
    if m < k:
        raise ValueError(f"fewer distinct values ({m}) than classes ({k})")
    if k == 1:
        return ClassBreaks((), 1, labels)

    x = u - u.mean()
    cw = counts.astype(np.float64)
    W = np.concatenate([[0.0], np.cumsum(cw)])
    S1 = np.concatenate([[0.0], np.cumsum(cw * x)])
    S2 = np.concatenate([[0.0], np.cumsum(cw * x * x)])

    def ssd(i, j):
        # cost of block [i, j) of distinct values; broadcastable
        n = W[j] - W[i]
        s = S1[j] - S1[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.maximum(S2[j] - S2[i] - s * s / n, 0.0)

    # suffix[c][i]: min cost of splitting u[i:] into c classes
    suffix = {1: np.full(m + 1, np.inf)}
    suffix[1][:m] = ssd(np.arange(m), m)
    nxt = {}
    block = max(1, int(4_000_000 // max(m, 1)))
    for c in range(2, k + 1):
        prev = suffix[c - 1]
        cur = np.full(m + 1, np.inf)
        arg = np.zeros(m + 1, dtype=np.int64)
        last_i = m - c
        starts = np.arange(0, last_i + 1) if c < k else np.array([0])
        js = np.arange(1, m)
        for b0 in range(0, len(starts), block):
            ii = starts[b0:b0 + block]
            cand = ssd(ii[:, None], js[None, :]) + prev[js][None, :]
            cand[js[None, :] <= ii[:, None]] = np.inf
            best = np.argmin(cand, axis=1)
            cur[ii] = cand[np.arange(len(ii)), best]
            arg[ii] = js[best]
        suffix[c], nxt[c] = cur, arg

    splits = []
    i = 0
    for c in range(k, 1, -1):
        i = int(nxt[c][i])
        splits.append(i)
    return ClassBreaks(tuple(u[j - 1] for j in splits), k, labels)


def classify(g: Grid, cb: ClassBreaks) -> Grid:
    """Map valid cells to class ids ``1..k``; a value equal to a break stays in the lower class."""
    ids = np.searchsorted(np.asarray(cb.breaks, dtype=np.float64), g.values, side="left") + 1
    return Grid.from_masked(g.header, ids.astype(np.float64), g.mask)
