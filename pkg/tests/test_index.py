import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwvuln.grid import Grid, GridHeader, HeaderMismatchError
from gwvuln.index import (
    IndexModel, build_vulnerability_map, class_area_summary, compute_index, scheme_parameters,
)
from gwvuln.tables import DRASTIC_WEIGHTS, standard_schemes

H1 = GridHeader(1, 1, 0, 0, 1)


def point_model(scheme, ratings, weights=None):
    params = scheme_parameters(scheme)
    weights = weights or [DRASTIC_WEIGHTS[p] for p in params]
    return IndexModel(scheme, weights, {p: Grid(H1, [r]) for p, r in zip(params, ratings)})


def test_hand_sum():
    vi = compute_index(point_model("drastic", (8, 7, 6, 4, 8, 6, 4)))
    assert vi.values[0, 0] == 144


@pytest.mark.parametrize("scheme, ratings, expected", [
    ("drastic", (10, 10, 8, 10, 10, 10, 10), 224),
    ("drastic", (2, 3, 2, 3, 2, 2, 2), 52),
    ("drastic_lu", (2, 3, 2, 3, 2, 2, 2, 1), 57),
    ("drastic_lu", (10, 10, 8, 10, 10, 10, 10, 10), 274),
])
def test_extreme_index_values(scheme, ratings, expected):
    assert compute_index(point_model(scheme, ratings)).values[0, 0] == expected


def test_extremes_follow_from_rating_tables():
    schemes = standard_schemes()
    hi = [max(e.rating for e in schemes[p].entries) for p in scheme_parameters("drastic_lu")]
    lo = [min(e.rating for e in schemes[p].entries) for p in scheme_parameters("drastic_lu")]
    assert hi == [10, 10, 8, 10, 10, 10, 10, 10]
    assert lo == [2, 3, 2, 3, 2, 2, 2, 1]


def test_model_validation():
    with pytest.raises(ValueError, match="missing"):
        IndexModel("drastic_lu", [1] * 8, {p: Grid(H1, [1]) for p in scheme_parameters("drastic")})
    with pytest.raises(ValueError, match="weights"):
        point_model("drastic", (1,) * 7, weights=[1] * 8)
    layers = {p: Grid(H1, [1]) for p in scheme_parameters("drastic")}
    layers["C"] = Grid(GridHeader(1, 1, 0, 0, 2), [1])
    with pytest.raises(HeaderMismatchError, match="cellsize"):
        IndexModel("drastic", [1] * 7, layers)
    with pytest.raises(ValueError):
        scheme_parameters("godt")


def grid_layers(scheme, arrays, header):
    return {p: Grid(header, a) for p, a in zip(scheme_parameters(scheme), arrays)}


def test_constant_layers_only_one_class():
    h = GridHeader(3, 3, 0, 0, 1)
    model = IndexModel("drastic", [5, 4, 3, 2, 1, 5, 3], grid_layers("drastic", [[5] * 9] * 7, h))
    assert build_vulnerability_map(model, k=1).classes.valid_values().tolist() == [1] * 9
    with pytest.raises(ValueError):
        build_vulnerability_map(model, k=2)


def test_two_level_surface_split_at_gap():
    h = GridHeader(4, 1, 0, 0, 1)
    d = [2, 2, 10, 10]
    arrays = [d] + [[5] * 4] * 6
    vm = build_vulnerability_map(IndexModel("drastic", [5, 4, 3, 2, 1, 5, 3], grid_layers("drastic", arrays, h)), 2)
    assert vm.classes.flat().tolist() == [1, 1, 2, 2]


def test_nodata_propagates_to_classes():
    h = GridHeader(2, 2, 0, 0, 1)
    arrays = [[1, 2, 3, 4]] * 7
    arrays[3] = [1, -9999, 3, 4]
    vm = build_vulnerability_map(IndexModel("drastic", [1] * 7, grid_layers("drastic", arrays, h)), 2)
    assert vm.classes.mask.tolist() == [[True, False], [True, True]]


def test_area_summary_examples():
    h = GridHeader(2, 2, 0, 0, 1)
    s = class_area_summary(Grid(h, [1, 1, 2, -9999]))
    assert [(r.class_id, r.cells) for r in s.rows] == [(1, 2), (2, 1)]
    assert [round(r.percent, 2) for r in s.rows] == [66.67, 33.33]
    assert class_area_summary(Grid(h, [3, 3, 3, 3])).rows[0].percent == 100.0
    empty = class_area_summary(Grid.full(h, -9999))
    assert empty.empty and empty.rows == ()


def test_area_summary_lists_empty_classes_when_k_given():
    s = class_area_summary(Grid(GridHeader(3, 1, 0, 0, 1), [1, 3, 3]), k=4)
    assert [r.cells for r in s.rows] == [1, 0, 2, 0]


rating_arrays = st.lists(st.lists(st.integers(1, 10), min_size=16, max_size=16), min_size=8, max_size=8)


@settings(max_examples=60, deadline=None)
@given(rating_arrays, st.integers(-3, 3))
def test_homogeneity(arrays, e):
    h = GridHeader(4, 4, 0, 0, 1)
    alpha = 2.0 ** e  # power of two keeps the scaling exact
    w = [DRASTIC_WEIGHTS[p] for p in scheme_parameters("drastic_lu")]
    base = IndexModel("drastic_lu", w, grid_layers("drastic_lu", arrays, h))
    scaled = IndexModel("drastic_lu", [alpha * x for x in w], base.rating_layers)
    vi_a, vi_b = compute_index(base), compute_index(scaled)
    assert np.array_equal(vi_b.values, alpha * vi_a.values)
    k = min(3, len(np.unique(vi_a.values)))
    assert build_vulnerability_map(base, k).classes == build_vulnerability_map(scaled, k).classes


@settings(max_examples=60, deadline=None)
@given(rating_arrays)
def test_normalised_weights_give_same_classes(arrays):
    h = GridHeader(4, 4, 0, 0, 1)
    w = [DRASTIC_WEIGHTS[p] for p in scheme_parameters("drastic_lu")]
    base = IndexModel("drastic_lu", w, grid_layers("drastic_lu", arrays, h))
    norm = IndexModel("drastic_lu", [x / sum(w) for x in w], base.rating_layers)
    a, b = compute_index(base).values.ravel(), compute_index(norm).values.ravel()
    np.testing.assert_allclose(b, a / sum(w), rtol=1e-11)  # 12 significant digits
    # equal integer-weight indices stay equal, so rankings and ROC ties agree
    assert np.array_equal(a[:, None] == a[None, :], b[:, None] == b[None, :])
    assert np.array_equal(a[:, None] < a[None, :], b[:, None] < b[None, :])


@settings(max_examples=100)
@given(st.lists(st.integers(1, 10), min_size=8, max_size=8), st.integers(0, 7), st.integers(1, 9))
def test_monotone_in_each_rating(ratings, i, bump):
    lo = compute_index(point_model("drastic_lu", ratings)).values[0, 0]
    raised = list(ratings)
    raised[i] = min(10, raised[i] + bump)
    assert compute_index(point_model("drastic_lu", raised)).values[0, 0] >= lo


@given(st.lists(st.one_of(st.integers(1, 5), st.just(-9999)), min_size=1, max_size=30))
def test_area_percent_totals_100(ids):
    s = class_area_summary(Grid(GridHeader(len(ids), 1, 0, 0, 1), ids))
    if s.empty:
        return
    assert sum(r.percent for r in s.rows) == pytest.approx(100.0)
    assert sum(r.cells for r in s.rows) == s.n_valid
