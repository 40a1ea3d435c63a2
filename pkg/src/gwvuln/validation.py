"""Validation of vulnerability maps against point nitrate observations."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from gwvuln.grid import Grid, OutOfBoundsError, format_number, sample_at

NITRATE_LIMIT_MG_L = 50.0


class Observation(NamedTuple):
    x: float
    y: float
    nitrate: float


def read_observations_csv(text: str) -> list[Observation]:
    reader = csv.reader(io.StringIO(text))
    header = [h.strip().lower() for h in next(reader, [])]
    if header != ["x", "y", "nitrate_mg_l"]:
        raise ValueError(f"expected CSV header 'x,y,nitrate_mg_l', got {','.join(header)!r}")
    obs = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise ValueError(f"line {lineno}: expected 3 fields, got {len(row)}")
        try:
            x, y, n = (float(c) for c in row)
        except ValueError:
            raise ValueError(f"line {lineno}: non-numeric field in {row!r}") from None
        if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(n)) or n < 0:
            raise ValueError(f"line {lineno}: invalid observation {row!r}")
        obs.append(Observation(x, y, n))
    return obs


def load_observations(path) -> list[Observation]:
    with open(path, encoding="utf-8") as fh:
        return read_observations_csv(fh.read())


def write_observations_csv(obs: Iterable[Observation]) -> str:
    lines = ["x,y,nitrate_mg_l"]
    lines += [",".join(format_number(v) for v in o) for o in obs]
    return "\n".join(lines) + "\n"


def binarize(obs: Sequence[Observation], threshold: float = NITRATE_LIMIT_MG_L) -> list[tuple[Observation, bool]]:
    """Label each observation positive when nitrate strictly exceeds ``threshold``."""
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    return [(o, o.nitrate > threshold) for o in obs]


class ScoredWell(NamedTuple):
    score: float
    label: bool
    obs: Observation


@dataclass(frozen=True)
class ScoredWells:
    wells: tuple
    n_outside: int
    n_nodata: int

    @property
    def n_skipped(self) -> int:
        return self.n_outside + self.n_nodata

    @property
    def scores(self) -> list:
        return [w.score for w in self.wells]

    @property
    def labels(self) -> list:
        return [w.label for w in self.wells]


def _lookup(g: Grid, obs: Sequence[Observation]):
    found, outside, nodata = [], 0, 0
    for o in obs:
        try:
            v = sample_at(g, o.x, o.y)
        except OutOfBoundsError:
            outside += 1
            continue
        if v is None:
            nodata += 1
            continue
        found.append((v, o))
    return found, outside, nodata


def score_wells(vi: Grid, obs: Sequence[Observation], threshold: float = NITRATE_LIMIT_MG_L) -> ScoredWells:
    """Sample the index surface at every well; skip wells outside or on nodata."""
    found, outside, nodata = _lookup(vi, obs)
    if not found:
        raise ValueError(f"no well falls on a valid cell ({outside} outside, {nodata} on nodata)")
    wells = tuple(ScoredWell(v, o.nitrate > threshold, o) for v, o in found)
    return ScoredWells(wells, outside, nodata)


@dataclass(frozen=True)
class RocResult:
    """ROC staircase from (0, 0) to (1, 1).

    ``thresholds[i]`` is the score cut producing ``points[i]``; the first
    point uses ``+inf`` (nothing predicted positive).
    """

    points: tuple
    thresholds: tuple
    auc: float
    n_pos: int
    n_neg: int


def roc_auc(scores: Sequence[float], labels: Sequence[bool]) -> RocResult:
    """Threshold sweep over distinct scores (descending), trapezoidal AUC.

    Tied scores form one step, so the area equals the Mann-Whitney
    probability ``P(pos > neg) + P(pos == neg) / 2``. The area is accumulated
    in integer counts and divided once.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=bool)
    if s.shape != y.shape:
        raise ValueError("scores and labels differ in length")
    n_pos = int(y.sum())
    n_neg = int(len(y) - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC undefined: need at least one positive and one negative label")
    distinct = np.unique(s)[::-1]
    idx = np.searchsorted(-distinct, -s)  # position of each score in descending order
    tp = np.concatenate([[0], np.cumsum(np.bincount(idx[y], minlength=len(distinct)))])
    fp = np.concatenate([[0], np.cumsum(np.bincount(idx[~y], minlength=len(distinct)))])
    twice_area = sum(int(df) * int(t0 + t1) for df, t0, t1 in zip(np.diff(fp), tp[:-1], tp[1:]))
    auc = twice_area / (2 * n_pos * n_neg)
    points = tuple((int(f) / n_neg, int(t) / n_pos) for f, t in zip(fp, tp))
    thresholds = (math.inf,) + tuple(float(d) for d in distinct)
    return RocResult(points, thresholds, auc, n_pos, n_neg)


def mann_whitney_auc(scores: Sequence[float], labels: Sequence[bool]) -> float:
    """O(n^2) pairwise AUC; used as an independent check of :func:`roc_auc`."""
    pos = [s for s, l in zip(scores, labels) if l]
    neg = [s for s, l in zip(scores, labels) if not l]
    if not pos or not neg:
        raise ValueError("AUC undefined: need at least one positive and one negative label")
    twice = 0
    for p in pos:
        for n in neg:
            twice += 2 if p > n else (1 if p == n else 0)
    return twice / (2 * len(pos) * len(neg))


def write_roc_csv(roc: RocResult) -> str:
    lines = ["threshold,fpr,tpr"]
    for t, (f, p) in zip(roc.thresholds, roc.points):
        lines.append(f"{format_number(t) if math.isfinite(t) else 'inf'},{format_number(f)},{format_number(p)}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ZoneMetrics:
    """Zone-coincidence percentages; ``None`` marks an undefined metric."""

    pct_high_area: float | None
    pct_pos_in_high: float | None
    pct_neg_in_low: float | None
    n_pos: int
    n_neg: int
    n_skipped: int


def zone_coincidence(classes: Grid, obs: Sequence[Observation], threshold: float = NITRATE_LIMIT_MG_L,
                     high_set: Iterable[int] = (4, 5), low_set: Iterable[int] = (1, 2, 3)) -> ZoneMetrics:
    """Share of exceeding wells in high zones and non-exceeding wells in low zones."""
    high, low = {int(c) for c in high_set}, {int(c) for c in low_set}
    if high & low:
        raise ValueError(f"high_set and low_set overlap: {sorted(high & low)}")
    valid = classes.valid_values()
    pct_area = 100.0 * float(np.isin(valid, list(high)).sum()) / valid.size if valid.size else None
    found, outside, nodata = _lookup(classes, obs)
    pos = [int(c) for c, o in found if o.nitrate > threshold]
    neg = [int(c) for c, o in found if not o.nitrate > threshold]
    a = 100.0 * sum(c in high for c in pos) / len(pos) if pos else None
    b = 100.0 * sum(c in low for c in neg) / len(neg) if neg else None
    return ZoneMetrics(pct_area, a, b, len(pos), len(neg), outside + nodata)
