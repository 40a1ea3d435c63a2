"""Scattered-point interpolation onto a grid: IDW and ordinary kriging."""
from __future__ import annotations

import csv
import io
import math
import threading
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg as spl

from gwvuln._parallel import map_rows
from gwvuln.grid import Grid, GridHeader

COINCIDE_FACTOR = 1e-9

# some bundled OpenBLAS builds corrupt memory under concurrent getrs calls
_LAPACK_LOCK = threading.Lock()
EPS_SILL = 1e-12
VARIOGRAM_SHAPES = ("spherical", "exponential", "gaussian")


class SamplePoint(NamedTuple):
    x: float
    y: float
    value: float


class KrigingError(ValueError):
    pass


class KrigingConditionWarning(RuntimeWarning):
    pass


def as_point_array(points) -> np.ndarray:
    """Validate sample points and return them as an ``(n, 3)`` float array.

    Raises ValueError on empty input, non-finite fields, or repeated (x, y).
    """
    arr = np.asarray([tuple(p) for p in points], dtype=np.float64).reshape(-1, 3)
    if len(arr) == 0:
        raise ValueError("empty point set")
    if not np.isfinite(arr).all():
        raise ValueError("sample points must have finite coordinates and values")
    seen: dict[tuple[float, float], int] = {}
    for i, (x, y) in enumerate(arr[:, :2].tolist()):
        if (x, y) in seen:
            raise ValueError(f"duplicate sample location ({x}, {y}) at points {seen[(x, y)]} and {i}")
        seen[(x, y)] = i
    return arr


def read_points_csv(text: str) -> list[SamplePoint]:
    """Parse ``x,y,value`` CSV text."""
    reader = csv.reader(io.StringIO(text))
    header = [h.strip().lower() for h in next(reader, [])]
    if header != ["x", "y", "value"]:
        raise ValueError(f"expected CSV header 'x,y,value', got {','.join(header)!r}")
    pts = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise ValueError(f"line {lineno}: expected 3 fields, got {len(row)}")
        try:
            pts.append(SamplePoint(*(float(c) for c in row)))
        except ValueError:
            raise ValueError(f"line {lineno}: non-numeric field in {row!r}") from None
    as_point_array(pts)
    return pts


def load_points(path) -> list[SamplePoint]:
    with open(path, encoding="utf-8") as fh:
        return read_points_csv(fh.read())


def write_points_csv(points: Sequence[SamplePoint]) -> str:
    from gwvuln.grid import format_number

    lines = ["x,y,value"]
    lines += [",".join(format_number(v) for v in p) for p in points]
    return "\n".join(lines) + "\n"


# -- IDW ---------------------------------------------------------------------

def idw(points, geometry: GridHeader, power: float = 2.0, k: int = 12,
        threads: int | None = 1) -> Grid:
    """Inverse-distance-weighted interpolation over the ``k`` nearest samples.

    Distances are measured from cell centers. A cell whose center lies within
    ``1e-9 * cellsize`` of a sample takes that sample's value exactly.
    """
    if power <= 0:
        raise ValueError("power must be positive")
    if k < 1:
        raise ValueError("k must be >= 1")
    pts = as_point_array(points)
    px, py, pz = pts[:, 0], pts[:, 1], pts[:, 2]
    k = min(int(k), len(pts))
    eps = COINCIDE_FACTOR * geometry.cellsize
    xs, ys = geometry.cell_centers()

    def row(r):
        d = np.hypot(xs[:, None] - px[None, :], ys[r] - py[None, :])
        order = np.argsort(d, axis=1, kind="stable")[:, :k]
        dk = np.take_along_axis(d, order, axis=1)
        zk = pz[order]
        out = np.empty(len(xs))
        hit = dk[:, 0] < eps
        out[hit] = zk[hit, 0]
        miss = ~hit
        w = dk[miss] ** (-power)
        out[miss] = (w * zk[miss]).sum(axis=1) / w.sum(axis=1)
        return out

    return Grid(geometry, map_rows(row, geometry.nrows, threads))


# -- variograms --------------------------------------------------------------

@dataclass(frozen=True)
class EmpiricalVariogram:
    lag_centers: np.ndarray
    semivariance: np.ndarray
    pair_counts: np.ndarray
    max_dist: float

    @property
    def nonempty(self) -> np.ndarray:
        return self.pair_counts > 0


@dataclass(frozen=True)
class VariogramModel:
    """Isotropic variogram.

    ``gamma(0) = 0``; for ``h > 0`` the model is
    ``nugget + (sill - nugget) * f(h / range)`` with ``f`` the unit shape.
    Exponential and gaussian shapes use the practical-range convention
    (95 % of the partial sill reached at ``h = range``).
    """

    shape: str
    nugget: float
    sill: float
    range: float
    degenerate: bool = False

    def __post_init__(self):
        if self.shape not in VARIOGRAM_SHAPES:
            raise ValueError(f"unknown variogram shape {self.shape!r}")
        if not (self.nugget >= 0 and self.sill >= self.nugget):
            raise ValueError("variogram requires 0 <= nugget <= sill")
        if not self.range > 0:
            raise ValueError("variogram range must be positive")

    def __call__(self, h):
        h = np.asarray(h, dtype=np.float64)
        g = self.nugget + (self.sill - self.nugget) * unit_shape(self.shape, h / self.range)
        return np.where(h > 0, g, 0.0)


def unit_shape(shape: str, r):
    r = np.asarray(r, dtype=np.float64)
    if shape == "spherical":
        return np.where(r < 1.0, 1.5 * r - 0.5 * r**3, 1.0)
    if shape == "exponential":
        return 1.0 - np.exp(-3.0 * r)
    if shape == "gaussian":
        return 1.0 - np.exp(-3.0 * r * r)
    raise ValueError(f"unknown variogram shape {shape!r}")


def _pair_distances(pts):
    i, j = np.triu_indices(len(pts), k=1)
    d = np.hypot(pts[i, 0] - pts[j, 0], pts[i, 1] - pts[j, 1])
    return i, j, d


def empirical_variogram(points, n_lags: int = 12, max_dist: float | None = None) -> EmpiricalVariogram:
    """Binned semivariance of all point pairs separated by at most ``max_dist``.

    Bins are uniform of width ``max_dist / n_lags``; a separation exactly on
    ``max_dist`` falls in the last bin. ``max_dist`` defaults to half the
    largest pair separation. Points are put in a canonical order first, so
    the result does not depend on input order.
    """
    pts = as_point_array(points)
    if len(pts) < 2:
        raise ValueError("empirical variogram needs at least 2 points")
    if n_lags < 1:
        raise ValueError("n_lags must be >= 1")
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    i, j, d = _pair_distances(pts)
    if max_dist is None:
        max_dist = 0.5 * float(d.max())
    if not max_dist > 0:
        raise ValueError("max_dist must be positive")
    width = max_dist / n_lags
    keep = d <= max_dist
    bins = np.minimum((d[keep] / width).astype(np.int64), n_lags - 1)
    sq = 0.5 * (pts[i[keep], 2] - pts[j[keep], 2]) ** 2
    counts = np.bincount(bins, minlength=n_lags)
    sums = np.zeros(n_lags)
    for b, s in zip(bins.tolist(), sq.tolist()):
        sums[b] += s
    gamma = np.divide(sums, counts, out=np.zeros(n_lags), where=counts > 0)
    centers = (np.arange(n_lags) + 0.5) * width
    return EmpiricalVariogram(centers, gamma, counts, float(max_dist))


def _wls_nugget_psill(f, y, w):
    """Weighted LS of ``y ~ nugget + psill * f`` with both coefficients >= 0."""
    sw, swf, swff = w.sum(), (w * f).sum(), (w * f * f).sum()
    swy, swfy = (w * y).sum(), (w * f * y).sum()
    cands = []
    det = sw * swff - swf * swf
    if det > 1e-12 * sw * swff:
        n = (swff * swy - swf * swfy) / det
        p = (sw * swfy - swf * swy) / det
        if n >= 0 and p >= 0:
            cands.append((n, p))
    if swff > 0:
        cands.append((0.0, max(swfy / swff, 0.0)))
    cands.append((max(swy / sw, 0.0), 0.0))
    best = None
    for n, p in cands:
        sse = float((w * (n + p * f - y) ** 2).sum())
        if best is None or sse < best[0]:
            best = (sse, n, p)
    return best


def fit_variogram(ev: EmpiricalVariogram, shape: str = "spherical",
                  n_candidates: int = 400) -> VariogramModel:
    """Fit (nugget, sill, range) by pair-count-weighted least squares.

    The range is grid-searched; at each candidate range the nugget and
    partial sill follow in closed form. The best candidate is then refined by
    golden-section search between its two neighbours.
    """
    if shape not in VARIOGRAM_SHAPES:
        raise ValueError(f"unknown variogram shape {shape!r}")
    ok = ev.nonempty
    if ok.sum() < 3:
        raise ValueError("variogram fit needs at least 3 non-empty lag bins")
    h = ev.lag_centers[ok]
    y = ev.semivariance[ok]
    w = ev.pair_counts[ok].astype(np.float64)
    hmax = float(h.max())

    if not (y > 0).any():
        return VariogramModel(shape, 0.0, EPS_SILL, hmax, degenerate=True)
    if y.max() - y.min() <= 1e-12 * y.max():
        c = float(y[0])
        return VariogramModel(shape, c, c, hmax, degenerate=True)

    def score(a):
        return _wls_nugget_psill(unit_shape(shape, h / a), y, w)

    ranges = np.linspace(hmax / 100.0, 3.0 * hmax, n_candidates)
    sses = np.array([score(a)[0] for a in ranges])
    ib = int(np.argmin(sses))
    lo = ranges[max(ib - 1, 0)]
    hi = ranges[min(ib + 1, len(ranges) - 1)]

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = hi - invphi * (hi - lo), lo + invphi * (hi - lo)
    fc, fd = score(c)[0], score(d)[0]
    for _ in range(100):
        if hi - lo <= 1e-12 * hi:
            break
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = score(c)[0]
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = score(d)[0]
    a = 0.5 * (lo + hi)
    sse, n, p = score(a)
    if sses[ib] < sse:
        a = float(ranges[ib])
        sse, n, p = score(a)
    if p <= 0.0:
        return VariogramModel(shape, float(n), float(n), hmax, degenerate=True)
    return VariogramModel(shape, float(n), float(n + p), float(a))


# -- ordinary kriging --------------------------------------------------------

def _kriging_system(pts, model: VariogramModel):
    n = len(pts)
    scale = model.sill if model.sill > 0 else 1.0
    d = np.hypot(pts[:, None, 0] - pts[None, :, 0], pts[:, None, 1] - pts[None, :, 1])
    a = np.zeros((n + 1, n + 1))
    a[:n, :n] = model(d) / scale
    a[:n, n] = 1.0
    a[n, :n] = 1.0
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > 1e15:
        close = [(int(i), int(j)) for i, j in zip(*np.triu_indices(n, 1)) if d[i, j] < 1e-6 * max(d.max(), 1.0)]
        detail = f"nearly coincident points {close}" if close else "check the variogram model"
        raise KrigingError(f"singular kriging system ({detail})")
    if cond > 1e10:
        warnings.warn(f"ill-conditioned kriging system (cond={cond:.3g})", KrigingConditionWarning)
    return spl.lu_factor(a), scale


def kriging_weights(points, model: VariogramModel, x: float, y: float) -> np.ndarray:
    """Ordinary-kriging weights for one prediction location (sum to 1)."""
    pts = as_point_array(points)
    lu, scale = _kriging_system(pts, model)
    b = np.append(model(np.hypot(pts[:, 0] - x, pts[:, 1] - y)) / scale, 1.0)
    return spl.lu_solve(lu, b)[:-1]


def kriging(points, geometry: GridHeader, model: VariogramModel,
            threads: int | None = 1) -> Grid:
    """Ordinary kriging with a global neighbourhood.

    The ``(n+1)``-square system is LU-factored once (partial pivoting) and
    solved for every cell centre.
    """
    pts = as_point_array(points)
    if len(pts) < 2:
        raise ValueError("kriging needs at least 2 points")
    lu, scale = _kriging_system(pts, model)
    px, py, pz = pts[:, 0], pts[:, 1], pts[:, 2]
    eps = COINCIDE_FACTOR * geometry.cellsize
    xs, ys = geometry.cell_centers()

    def row(r):
        d = np.hypot(px[:, None] - xs[None, :], py[:, None] - ys[r])
        rhs = np.vstack([model(d) / scale, np.ones(len(xs))])
        with _LAPACK_LOCK:
            lam = spl.lu_solve(lu, rhs)[:-1]
        out = pz @ lam
        dmin = d.min(axis=0)
        hit = dmin < eps
        if hit.any():
            out[hit] = pz[d[:, hit].argmin(axis=0)]
        return out

    return Grid(geometry, map_rows(row, geometry.nrows, threads))


def interpolate_layer(points, geometry: GridHeader, method: str = "idw",
                      threads: int | None = 1, **params) -> Grid:
    """Dispatch to IDW or kriging from a per-layer configuration mapping.

    IDW accepts ``power`` and ``k``. Kriging accepts either an explicit
    ``variogram`` mapping with ``shape/nugget/sill/range`` or fitting options
    ``shape``, ``n_lags`` and ``max_dist``.
    """
    if method == "idw":
        return idw(points, geometry, power=params.get("power", 2.0),
                   k=params.get("k", 12), threads=threads)
    if method == "kriging":
        vm = params.get("variogram")
        if vm is not None and "range" in vm:
            model = VariogramModel(vm.get("shape", "spherical"), vm["nugget"], vm["sill"], vm["range"])
        else:
            vm = vm or {}
            ev = empirical_variogram(points, n_lags=vm.get("n_lags", params.get("n_lags", 12)),
                                     max_dist=vm.get("max_dist", params.get("max_dist")))
            model = fit_variogram(ev, vm.get("shape", params.get("shape", "spherical")))
        return kriging(points, geometry, model, threads=threads)
    raise ValueError(f"unknown interpolation method {method!r}")
