"""Criterion weights from pairwise comparisons: crisp AHP and fuzzy AHP.

Crisp AHP normalises each column of the reciprocal comparison matrix by its
sum and averages across rows. Fuzzy AHP works on triangular fuzzy numbers
``(l, m, u)``: every cell is defuzzified by its centroid and each
criterion's weight is its row total over the grand total.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

# Saaty random consistency index, n = 1..10.
RANDOM_INDEX = {1: 0.0, 2: 0.0, 3: 0.58, 4: 0.90, 5: 1.12, 6: 1.24, 7: 1.32, 8: 1.41, 9: 1.45, 10: 1.49}
CR_THRESHOLD = 0.1
SAATY_MIN, SAATY_MAX = 1.0 / 9.0, 9.0

SAATY_SCALE = {
    1: "Equal importance",
    2: "Intermediate value",
    3: "Moderate importance",
    4: "Intermediate value",
    5: "Strong importance",
    6: "Intermediate value",
    7: "Very strong importance",
    8: "Intermediate value",
    9: "Extreme importance",
}


class SaatyScaleWarning(UserWarning):
    pass


class PairwiseMatrix:
    """Positive reciprocal comparison matrix.

    ``a[i][j] * a[j][i]`` must equal 1 within ``1e-9`` and the diagonal must
    be 1. Entries outside Saaty's ``[1/9, 9]`` range only warn.
    """

    def __init__(self, a, labels: Sequence[str] | None = None):
        a = np.array(a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError("pairwise matrix must be square and non-empty")
        if not (np.isfinite(a).all() and (a > 0).all()):
            raise ValueError("pairwise matrix entries must be positive and finite")
        n = a.shape[0]
        if not np.allclose(np.diag(a), 1.0, rtol=0, atol=1e-9):
            raise ValueError("pairwise matrix diagonal must be 1")
        bad = np.argwhere(np.abs(a * a.T - 1.0) > 1e-9)
        if len(bad):
            i, j = bad[0]
            raise ValueError(f"reciprocity violated at ({i}, {j}): {a[i, j]} * {a[j, i]} != 1")
        if ((a < SAATY_MIN - 1e-9) | (a > SAATY_MAX + 1e-9)).any():
            warnings.warn("pairwise entries outside the 1/9..9 Saaty range", SaatyScaleWarning)
        a.setflags(write=False)
        self.a = a
        self.n = n
        self.labels = tuple(labels) if labels is not None else tuple(f"C{i + 1}" for i in range(n))
        if len(self.labels) != n:
            raise ValueError("need one label per criterion")

    def __repr__(self):
        return f"PairwiseMatrix(n={self.n}, labels={self.labels})"


@dataclass(frozen=True)
class WeightVector:
    w: tuple
    labels: tuple

    def __post_init__(self):
        w = tuple(float(x) for x in self.w)
        if len(w) != len(self.labels):
            raise ValueError("need one label per weight")
        if any(x <= 0 for x in w):
            raise ValueError("weights must be strictly positive")
        if abs(sum(w) - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {sum(w)}")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "labels", tuple(self.labels))

    def as_array(self) -> np.ndarray:
        return np.array(self.w)

    def as_dict(self) -> dict:
        return dict(zip(self.labels, self.w))

    def __len__(self):
        return len(self.w)

    def __iter__(self):
        return iter(self.w)


def matrix_from_priorities(v: Sequence[float], labels: Sequence[str] | None = None) -> PairwiseMatrix:
    """Perfectly consistent ratio matrix ``a[i][j] = v[i] / v[j]``."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or len(v) == 0:
        raise ValueError("priorities must be a non-empty vector")
    if not (v > 0).all():
        raise ValueError("priorities must be positive")
    a = v[:, None] / v[None, :]
    # force exact reciprocity on the lower triangle
    iu = np.triu_indices(len(v), 1)
    a[iu[1], iu[0]] = 1.0 / a[iu]
    np.fill_diagonal(a, 1.0)
    return PairwiseMatrix(a, labels)


def ahp_weights(pm: PairwiseMatrix) -> WeightVector:
    normalized = pm.a / pm.a.sum(axis=0)
    w = normalized.mean(axis=1)
    return WeightVector(tuple(w / w.sum()), pm.labels)


class Consistency(NamedTuple):
    lambda_max: float
    ci: float
    cr: float
    acceptable: bool


def consistency(pm: PairwiseMatrix, w: WeightVector | None = None) -> Consistency:
    """Saaty consistency check.

    ``lambda_max`` is the mean of ``(A w)_i / w_i``. For ``n < 3`` every
    reciprocal matrix is consistent and CI = CR = 0.
    """
    if w is None:
        w = ahp_weights(pm)
    wv = np.asarray(w.w)
    n = pm.n
    lambda_max = float(np.mean(pm.a @ wv / wv))
    if n < 3:
        return Consistency(lambda_max, 0.0, 0.0, True)
    ci = (lambda_max - n) / (n - 1)
    ri = RANDOM_INDEX.get(n)
    if ri is None:
        raise ValueError(f"no random index tabulated for n={n} (supported: 1..10)")
    cr = ci / ri
    return Consistency(lambda_max, ci, cr, cr <= CR_THRESHOLD)


class Tfn(NamedTuple):
    """Triangular fuzzy number. Ordering ``l <= m <= u`` is not enforced here."""

    l: float
    m: float
    u: float


def tfn_membership(t: Tfn, x: float) -> float:
    """Membership degree of ``x`` in the triangle ``t``.

    The apex ``x == m`` always has degree 1, which also covers degenerate
    spans ``l == m`` or ``m == u``.
    """
    l, m, u = t
    if not l <= m <= u:
        raise ValueError(f"unordered triangular fuzzy number {tuple(t)}")
    if x == m:
        return 1.0
    if x <= l or x >= u:
        return 0.0
    if x < m:
        return (x - l) / (m - l)
    return (u - x) / (u - m)


def defuzzify_centroid(t: Tfn) -> float:
    l, m, u = t
    return (l + m + u) / 3.0


class FuzzyPairwiseMatrix:
    def __init__(self, a, labels: Sequence[str] | None = None):
        arr = np.array(a, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[0] != arr.shape[1] or arr.shape[2] != 3:
            raise ValueError("fuzzy matrix must have shape (n, n, 3)")
        if not (np.isfinite(arr).all() and (arr > 0).all()):
            raise ValueError("fuzzy matrix entries must be positive and finite")
        n = arr.shape[0]
        diag = arr[np.arange(n), np.arange(n)]
        if not np.allclose(diag, 1.0, rtol=0, atol=1e-9):
            raise ValueError("fuzzy matrix diagonal must be (1, 1, 1)")
        arr.setflags(write=False)
        self.a = arr
        self.n = n
        self.labels = tuple(labels) if labels is not None else tuple(f"C{i + 1}" for i in range(n))
        if len(self.labels) != n:
            raise ValueError("need one label per criterion")

    def cell(self, i: int, j: int) -> Tfn:
        return Tfn(*self.a[i, j])


def fuzzy_ahp_weights(fm: FuzzyPairwiseMatrix) -> WeightVector:
    """Centroid-defuzzify every cell, then normalise row totals by the grand total."""
    crisp = fm.a.sum(axis=2) / 3.0
    rows = crisp.sum(axis=1)
    return WeightVector(tuple(rows / rows.sum()), fm.labels)
