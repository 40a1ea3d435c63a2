import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwvuln.grid import GridHeader
from gwvuln.interpolation import (
    EmpiricalVariogram, KrigingConditionWarning, KrigingError, SamplePoint, VariogramModel, empirical_variogram,
    fit_variogram, idw, interpolate_layer, kriging, kriging_weights, read_points_csv,
)

GEOM = GridHeader(5, 4, 0.0, 0.0, 10.0)


def random_points(rng, n, lo=0.0, hi=50.0):
    xy = rng.uniform(lo, hi, size=(n, 2))
    z = rng.normal(10.0, 3.0, size=n)
    return [SamplePoint(float(x), float(y), float(v)) for (x, y), v in zip(xy, z)]


# -- IDW ----------------------------------------------------------------------

def test_idw_exact_at_sample():
    pts = [SamplePoint(15.0, 25.0, 12.5), SamplePoint(40.0, 5.0, 3.0)]
    g = idw(pts, GEOM)
    # cell (row 1, col 1) has center (15, 25)
    assert g.values[1, 1] == 12.5


def test_idw_equal_values_everywhere():
    pts = [SamplePoint(1.0, 2.0, 7.25), SamplePoint(33.0, 9.0, 7.25)]
    np.testing.assert_allclose(idw(pts, GEOM).values, 7.25, rtol=1e-14)


def test_idw_equidistant_midpoint():
    geom = GridHeader(1, 1, 0.0, 0.0, 10.0)  # single center at (5, 5)
    pts = [SamplePoint(0.0, 5.0, 0.0), SamplePoint(10.0, 5.0, 10.0)]
    assert idw(pts, geom, power=2, k=2).values[0, 0] == pytest.approx(5.0, abs=1e-6)


def test_idw_uses_k_nearest():
    geom = GridHeader(1, 1, 0.0, 0.0, 10.0)
    pts = [SamplePoint(4.0, 5.0, 1.0), SamplePoint(7.0, 5.0, 3.0), SamplePoint(100.0, 100.0, 1000.0)]
    # brute force over the two nearest: weights 1/1^2 and 1/2^2
    expected = (1.0 * 1.0 + 3.0 * 0.25) / 1.25
    assert idw(pts, geom, k=2).values[0, 0] == pytest.approx(expected, rel=1e-12)


def test_idw_empty_points():
    with pytest.raises(ValueError, match="empty"):
        idw([], GEOM)


def test_duplicate_points_rejected():
    with pytest.raises(ValueError, match="duplicate"):
        idw([SamplePoint(1, 1, 1), SamplePoint(1, 1, 2)], GEOM)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 15), st.floats(0.5, 4.0), st.floats(-50, 50))
def test_idw_bounds_and_shift(seed, k, power, c):
    rng = np.random.default_rng(seed)
    pts = random_points(rng, 8)
    z = np.array([p.value for p in pts])
    g = idw(pts, GEOM, power=power, k=k)
    assert g.values.min() >= z.min() - 1e-9 and g.values.max() <= z.max() + 1e-9
    shifted = idw([SamplePoint(p.x, p.y, p.value + c) for p in pts], GEOM, power=power, k=k)
    np.testing.assert_allclose(shifted.values, g.values + c, atol=1e-9)


def test_idw_threads_do_not_change_result():
    pts = random_points(np.random.default_rng(3), 20)
    geom = GridHeader(30, 25, 0.0, 0.0, 2.0)
    assert idw(pts, geom, threads=1) == idw(pts, geom, threads=4)


# -- empirical variogram -----------------------------------------------------

def test_empirical_variogram_single_pair():
    ev = empirical_variogram([SamplePoint(0, 0, 1), SamplePoint(3, 4, 3)], n_lags=1, max_dist=10)
    assert ev.semivariance.tolist() == [2.0]
    assert ev.pair_counts.tolist() == [1]
    assert ev.lag_centers.tolist() == [5.0]


def test_empirical_variogram_constant_values():
    pts = [SamplePoint(float(i), float(i * i % 7), 4.0) for i in range(8)]
    ev = empirical_variogram(pts, n_lags=4, max_dist=20)
    assert np.all(ev.semivariance == 0.0)


def test_empirical_variogram_all_pairs_too_far():
    pts = [SamplePoint(0, 0, 1), SamplePoint(100, 0, 2), SamplePoint(0, 100, 3)]
    ev = empirical_variogram(pts, n_lags=3, max_dist=50)
    assert ev.pair_counts.sum() == 0


def test_empirical_variogram_brute_force():
    rng = np.random.default_rng(11)
    pts = random_points(rng, 15)
    ev = empirical_variogram(pts, n_lags=5, max_dist=40.0)
    sums, counts = np.zeros(5), np.zeros(5, dtype=int)
    for a in range(len(pts)):
        for b in range(a + 1, len(pts)):
            h = math.dist(pts[a][:2], pts[b][:2])
            if h <= 40.0:
                k = min(int(h // 8.0), 4)
                sums[k] += 0.5 * (pts[a].value - pts[b].value) ** 2
                counts[k] += 1
    assert ev.pair_counts.tolist() == counts.tolist()
    np.testing.assert_allclose(ev.semivariance, np.divide(sums, np.maximum(counts, 1)), rtol=1e-12)


def test_empirical_variogram_needs_two_points():
    with pytest.raises(ValueError):
        empirical_variogram([SamplePoint(0, 0, 1)], 3, 10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.permutations(range(12)))
def test_empirical_variogram_order_invariant(seed, perm):
    pts = random_points(np.random.default_rng(seed), 12)
    a = empirical_variogram(pts, 6, 30.0)
    b = empirical_variogram([pts[i] for i in perm], 6, 30.0)
    assert a.semivariance.tobytes() == b.semivariance.tobytes()
    assert a.pair_counts.tolist() == b.pair_counts.tolist()


# -- variogram fitting ---------------------------------------------------------

def reference_model(shape, nugget, sill, rng_, h):
    """Independent transcription of the three model shapes."""
    out = []
    for d in h:
        r = d / rng_
        if shape == "spherical":
            f = 1.5 * r - 0.5 * r**3 if r < 1 else 1.0
        elif shape == "exponential":
            f = 1.0 - math.exp(-3.0 * r)
        else:
            f = 1.0 - math.exp(-3.0 * r * r)
        out.append(nugget + (sill - nugget) * f)
    return np.array(out)


def synthetic_ev(shape, nugget, sill, rng_, lags):
    lags = np.asarray(lags, dtype=float)
    return EmpiricalVariogram(lags, reference_model(shape, nugget, sill, rng_, lags),
                              np.full(len(lags), 40), float(lags[-1] + lags[0]))


@pytest.mark.parametrize("shape", ["spherical", "exponential", "gaussian"])
@pytest.mark.parametrize("truth", [(0.0, 1.0, 100.0), (0.2, 1.5, 80.0)])
def test_fit_recovers_parameters(shape, truth):
    nugget, sill, rng_ = truth
    ev = synthetic_ev(shape, nugget, sill, rng_, np.arange(1, 11) * 15.0)
    m = fit_variogram(ev, shape)
    assert m.nugget == pytest.approx(nugget, abs=0.01 * sill)
    assert m.sill == pytest.approx(sill, rel=0.01)
    assert m.range == pytest.approx(rng_, rel=0.01)


def test_fit_flat_variogram_is_pure_nugget():
    ev = EmpiricalVariogram(np.arange(1, 8) * 10.0, np.full(7, 2.5), np.full(7, 10), 80.0)
    m = fit_variogram(ev)
    assert (m.nugget, m.sill, m.range, m.degenerate) == (2.5, 2.5, 70.0, True)


def test_fit_all_zero():
    ev = EmpiricalVariogram(np.arange(1, 5) * 10.0, np.zeros(4), np.full(4, 3), 50.0)
    m = fit_variogram(ev)
    assert m.nugget == 0 and m.sill == 1e-12 and m.range == 40.0 and m.degenerate


def test_fit_too_few_bins():
    ev = EmpiricalVariogram(np.array([5.0, 15.0, 25.0]), np.array([1.0, 2.0, 0.0]),
                            np.array([3, 4, 0]), 30.0)
    with pytest.raises(ValueError, match="3 non-empty"):
        fit_variogram(ev)


def test_fit_ignores_empty_bins():
    ev = synthetic_ev("spherical", 0.0, 1.0, 100.0, np.arange(1, 11) * 15.0)
    counts = ev.pair_counts.copy()
    sv = ev.semivariance.copy()
    counts[3] = 0
    sv[3] = 0.0
    m = fit_variogram(EmpiricalVariogram(ev.lag_centers, sv, counts, ev.max_dist))
    assert m.range == pytest.approx(100.0, rel=0.01)


def test_fit_deterministic():
    pts = random_points(np.random.default_rng(5), 40, hi=200.0)
    ev = empirical_variogram(pts, 10, 150.0)
    a, b = fit_variogram(ev), fit_variogram(ev)
    assert (a.nugget, a.sill, a.range) == (b.nugget, b.sill, b.range)


def test_variogram_model_validation():
    with pytest.raises(ValueError):
        VariogramModel("spherical", 2.0, 1.0, 10.0)
    with pytest.raises(ValueError):
        VariogramModel("spherical", 0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        VariogramModel("linear", 0.0, 1.0, 1.0)


def test_variogram_model_shape():
    m = VariogramModel("spherical", 0.5, 2.0, 10.0)
    assert m(0.0) == 0.0
    h = np.linspace(0.01, 40, 200)
    g = m(h)
    assert np.all(np.diff(g) >= 0)
    assert g[-1] == 2.0


# -- kriging -------------------------------------------------------------------

MODEL = VariogramModel("spherical", 0.0, 1.0, 40.0)


def test_kriging_weights_sum_to_one():
    rng = np.random.default_rng(1)
    for _ in range(20):
        pts = random_points(rng, 10)
        lam = kriging_weights(pts, MODEL, *rng.uniform(0, 50, 2))
        assert abs(lam.sum() - 1.0) < 1e-9


def test_kriging_exact_at_sample():
    pts = [SamplePoint(15.0, 25.0, 42.0), SamplePoint(40.0, 5.0, 3.0), SamplePoint(2.0, 38.0, 9.0)]
    g = kriging(pts, GEOM, MODEL)
    assert g.values[1, 1] == pytest.approx(42.0, abs=1e-6)


@pytest.mark.parametrize("shape", ["spherical", "exponential", "gaussian"])
def test_kriging_midpoint_of_two(shape):
    geom = GridHeader(1, 1, 0.0, 0.0, 10.0)
    pts = [SamplePoint(-3.0, 5.0, 0.0), SamplePoint(13.0, 5.0, 10.0)]
    model = VariogramModel(shape, 0.1, 1.0, 30.0)
    assert kriging(pts, geom, model).values[0, 0] == pytest.approx(5.0, abs=1e-6)


def test_kriging_exact_weights_without_solver_shortcut():
    pts = [SamplePoint(15.0, 25.0, 42.0), SamplePoint(40.0, 5.0, 3.0), SamplePoint(2.0, 38.0, 9.0)]
    lam = kriging_weights(pts, MODEL, 15.0, 25.0)
    np.testing.assert_allclose(lam, [1.0, 0.0, 0.0], atol=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.floats(-100, 100))
def test_kriging_translation_equivariant(seed, c):
    pts = random_points(np.random.default_rng(seed), 9)
    a = kriging(pts, GEOM, MODEL)
    b = kriging([SamplePoint(p.x, p.y, p.value + c) for p in pts], GEOM, MODEL)
    np.testing.assert_allclose(b.values, a.values + c, atol=1e-7)


def test_kriging_near_coincident_points_singular():
    pts = [SamplePoint(0.0, 0.0, 1.0), SamplePoint(1e-16, 0.0, 2.0), SamplePoint(30.0, 30.0, 3.0)]
    with pytest.raises(KrigingError, match=r"\(0, 1\)"):
        kriging(pts, GEOM, MODEL)


def test_kriging_ill_conditioned_warns():
    pts = [SamplePoint(0.0, 0.0, 1.0), SamplePoint(1e-9, 0.0, 2.0), SamplePoint(30.0, 30.0, 3.0)]
    with pytest.warns(KrigingConditionWarning):
        g = kriging(pts, GEOM, MODEL)
    assert np.isfinite(g.values).all()


def test_kriging_threads_do_not_change_result():
    pts = random_points(np.random.default_rng(9), 25)
    geom = GridHeader(20, 30, 0.0, 0.0, 2.5)
    assert kriging(pts, geom, MODEL, threads=1) == kriging(pts, geom, MODEL, threads=3)


def test_interpolate_layer_dispatch():
    pts = random_points(np.random.default_rng(2), 30, hi=50)
    assert interpolate_layer(pts, GEOM, "idw", power=2, k=5) == idw(pts, GEOM, 2, 5)
    explicit = {"shape": "spherical", "nugget": 0.0, "sill": 1.0, "range": 40.0}
    assert interpolate_layer(pts, GEOM, "kriging", variogram=explicit) == kriging(pts, GEOM, MODEL)
    fitted = interpolate_layer(pts, GEOM, "kriging", variogram={"shape": "exponential", "n_lags": 8})
    assert fitted.mask.all()
    with pytest.raises(ValueError):
        interpolate_layer(pts, GEOM, "spline")


def test_points_csv():
    pts = read_points_csv("x,y,value\n0,0,1.5\n10,5,2\n")
    assert pts == [SamplePoint(0, 0, 1.5), SamplePoint(10, 5, 2)]
    with pytest.raises(ValueError, match="header"):
        read_points_csv("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError, match="line 3"):
        read_points_csv("x,y,value\n0,0,1\n1,x,2\n")
    with pytest.raises(ValueError, match="duplicate"):
        read_points_csv("x,y,value\n0,0,1\n0,0,2\n")
