import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwvuln.classification import (
    CategoryEntry, ClassBreaks, IntervalEntry, RatingScheme, apply_rating, classify,
    jenks_breaks, within_class_ssd,
)
from gwvuln.grid import Grid, GridHeader
from gwvuln.tables import rating_scheme, standard_schemes


def column(values):
    return Grid(GridHeader(1, len(values), 0, 0, 1), values)


# -- ratings ---------------------------------------------------------------------

@pytest.mark.parametrize("value, rating", [(10.0, 10), (60.0, 2), (17.90, 8), (5.70, 10), (66.50, 2)])
def test_depth_ratings(value, rating):
    assert apply_rating(column([value]), rating_scheme("D")).grid.values[0, 0] == rating


def test_barren_land_rating():
    lu = rating_scheme("LU")
    barren = next(e.code for e in lu.entries if e.label == "Barren land")
    assert apply_rating(column([barren]), lu).grid.values[0, 0] == 1


def test_out_of_range_becomes_nodata_and_is_counted():
    rated = apply_rating(column([3.0, 10.0, 70.0, -9999]), rating_scheme("D"))
    assert rated.n_unrated == 2
    assert rated.grid.mask.tolist() == [[False], [True], [False], [False]]


def test_unknown_category_is_counted():
    rated = apply_rating(column([1, 99]), rating_scheme("A"))
    assert rated.n_unrated == 1


def test_scheme_validation():
    with pytest.raises(ValueError, match="contiguous"):
        RatingScheme("D", "continuous", (IntervalEntry(0, 1, 1), IntervalEntry(2, 3, 2)), 5)
    with pytest.raises(ValueError, match="outside"):
        RatingScheme("D", "continuous", (IntervalEntry(0, 1, 11),), 5)
    with pytest.raises(ValueError, match="duplicate"):
        RatingScheme("A", "categorical", (CategoryEntry(1, "a", 2), CategoryEntry(1, "b", 3)), 3)
    with pytest.raises(ValueError):
        RatingScheme("A", "categorical", (CategoryEntry(1, "a", 2),), 0)


def test_scheme_dict_round_trip():
    for s in standard_schemes().values():
        assert RatingScheme.from_dict(s.to_dict()) == s


@settings(max_examples=100)
@given(st.sampled_from(list(standard_schemes())), st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=30))
def test_ratings_stay_in_bounds(param, values):
    scheme = standard_schemes()[param]
    out = apply_rating(column(values), scheme).grid
    v = out.valid_values()
    assert np.all((v >= 1) & (v <= 10))


# -- Jenks -----------------------------------------------------------------------

def test_jenks_two_clusters():
    cb = jenks_breaks([1, 2, 3, 10, 11, 12], 2)
    assert cb.breaks == (3.0,)
    assert classify(column([1, 2, 3, 10, 11, 12]), cb).flat().tolist() == [1, 1, 1, 2, 2, 2]


def test_jenks_k1():
    cb = jenks_breaks([4, 4, 4], 1)
    assert cb.breaks == () and cb.k == 1


def test_jenks_too_few_distinct():
    with pytest.raises(ValueError, match="distinct"):
        jenks_breaks([4, 4, 4], 2)


def test_jenks_rejects_bad_input():
    with pytest.raises(ValueError):
        jenks_breaks([], 1)
    with pytest.raises(ValueError):
        jenks_breaks([1, 2], 0)


def test_jenks_default_labels():
    assert jenks_breaks(range(10), 5).labels == ("very low", "low", "moderate", "high", "very high")
    assert jenks_breaks(range(10), 3).labels == ("low", "moderate", "high")


def test_jenks_tie_break_is_leftmost():
    # {0}|{1,2} and {0,1}|{2} cost the same; the earlier split wins
    assert jenks_breaks([0, 1, 2], 2).breaks == (0.0,)


def brute_force_cost(values, k):
    v = sorted(values)
    n = len(v)
    best = np.inf
    for cuts in itertools.combinations(range(1, n), k - 1):
        bounds = (0,) + cuts + (n,)
        cost = 0.0
        for a, b in zip(bounds, bounds[1:]):
            seg = np.array(v[a:b], dtype=float)
            cost += float(((seg - seg.mean()) ** 2).sum())
        best = min(best, cost)
    return best


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=12), st.integers(1, 4))
def test_jenks_matches_brute_force(values, k):
    if len(set(values)) < k:
        with pytest.raises(ValueError):
            jenks_breaks(values, k)
        return
    cb = jenks_breaks(values, k)
    assert within_class_ssd(values, cb.breaks) == pytest.approx(brute_force_cost(values, k), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 1000), min_size=5, max_size=40), st.integers(1, 5),
       st.integers(1, 8), st.integers(-500, 500))
def test_jenks_affine_invariance(values, k, a, b):
    if len(set(values)) < k:
        return
    g = column(values)
    g2 = column([a * v + b for v in values])
    c1 = classify(g, jenks_breaks(g.valid_values(), k))
    c2 = classify(g2, jenks_breaks(g2.valid_values(), k))
    assert c1 == c2


# -- classify ---------------------------------------------------------------------

def test_classify_conventions():
    cb = ClassBreaks((1.0, 2.0), 3)
    out = classify(column([0.5, 1.0, 1.5, 2.0, 3.0, -9999]), cb)
    assert out.flat().tolist() == [1, 1, 2, 2, 3, -9999]


def test_class_breaks_validation():
    with pytest.raises(ValueError):
        ClassBreaks((2.0, 1.0), 3)
    with pytest.raises(ValueError):
        ClassBreaks((1.0,), 3)
    with pytest.raises(ValueError):
        ClassBreaks((1.0,), 2, ("a",))


@given(st.lists(st.floats(-1e6, 1e6).filter(lambda x: x != -9999.0), min_size=2, max_size=40),
       st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=4, unique=True))
def test_classify_monotone(values, breaks):
    cb = ClassBreaks(tuple(sorted(breaks)), len(breaks) + 1)
    v = sorted(values)
    ids = classify(column(v), cb).flat()
    assert np.all(np.diff(ids) >= 0)
