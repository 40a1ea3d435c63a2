"""Deterministic synthetic basin for exercising the full workflow.

Every random draw comes from one ``numpy.random.Generator(PCG64(seed))``
consumed in a fixed order, so a scenario is a pure function of its fields.
Layers are smooth fields (a planar trend plus Gaussian bumps plus a little
white noise) rescaled into the standard rating ranges; categorical layers
are the same kind of field cut into equal-width bands.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from gwvuln.classification import apply_rating
from gwvuln.grid import Grid, GridHeader, save_grid, weighted_sum
from gwvuln.interpolation import SamplePoint, interpolate_layer, write_points_csv
from gwvuln.tables import DRASTIC_LU_PARAMETERS, DRASTIC_WEIGHTS, standard_schemes
from gwvuln.validation import NITRATE_LIMIT_MG_L, Observation, write_observations_csv

DEPTH_INTERPOLATION = {"method": "idw", "power": 2.0, "k": 12}
RECHARGE_INTERPOLATION = {"method": "kriging", "variogram": {"shape": "spherical", "n_lags": 12}}

# (trend strength, number of bumps, relative noise)
_DEFAULT_LAYER_SPECS = {
    "D": (1.0, 3, 0.02),
    "R": (0.6, 4, 0.02),
    "A": (0.8, 3, 0.02),
    "S": (0.5, 4, 0.03),
    "T": (0.4, 3, 0.03),
    "I": (0.7, 3, 0.02),
    "C": (0.9, 2, 0.02),
    "LU": (0.3, 5, 0.03),
}


@dataclass(frozen=True)
class SyntheticScenario:
    """Inputs of the generator.

    ``steepness`` is the slope of the logistic link between the planted
    vulnerability index (standardised over the valid cells) and the chance
    that a well exceeds the nitrate limit; ``inf`` makes the link a step.
    """

    seed: int = 2023
    ncols: int = 200
    nrows: int = 200
    cellsize: float = 50.0
    xllcorner: float = 0.0
    yllcorner: float = 0.0
    n_wells: int = 70
    n_depth_samples: int = 19
    n_recharge_samples: int = 40
    steepness: float = 6.0
    layer_specs: dict = field(default_factory=lambda: dict(_DEFAULT_LAYER_SPECS))
    planted_weights: tuple = tuple(DRASTIC_WEIGHTS[p] for p in DRASTIC_LU_PARAMETERS)

    @property
    def geometry(self) -> GridHeader:
        return GridHeader(self.ncols, self.nrows, self.xllcorner, self.yllcorner, self.cellsize)


@dataclass
class SyntheticData:
    scenario: SyntheticScenario
    layers: dict
    depth_samples: list
    recharge_samples: list
    observations: list
    planted_vi: Grid

    def config(self) -> dict:
        """Pipeline configuration matching the files written by :meth:`write`."""
        g = self.scenario.geometry
        layers = {p: {"grid": f"{p.lower()}.asc"} for p in DRASTIC_LU_PARAMETERS}
        layers["D"] = {"points": "depth_samples.csv", **DEPTH_INTERPOLATION}
        layers["R"] = {"points": "recharge_samples.csv", **RECHARGE_INTERPOLATION}
        return {
            "geometry": {"ncols": g.ncols, "nrows": g.nrows, "xllcorner": g.xllcorner,
                         "yllcorner": g.yllcorner, "cellsize": g.cellsize,
                         "nodata_value": g.nodata_value},
            "layers": layers,
            "ratings": "standard",
            "weights": "standard",
            "schemes": ["drastic", "drastic_lu", "ahp_lu", "fuzzy_ahp_lu"],
            "classification": {"k": 5},
            "validation": {"wells": "wells.csv", "threshold": NITRATE_LIMIT_MG_L},
            "output": {"dir": "out"},
        }

    def write(self, out_dir) -> list[str]:
        os.makedirs(out_dir, exist_ok=True)
        written = []

        def put(name, text):
            path = os.path.join(out_dir, name)
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            written.append(name)

        for p, g in self.layers.items():
            save_grid(g, os.path.join(out_dir, f"{p.lower()}.asc"))
            written.append(f"{p.lower()}.asc")
        save_grid(self.planted_vi, os.path.join(out_dir, "planted_vi.asc"))
        written.append("planted_vi.asc")
        put("depth_samples.csv", write_points_csv(self.depth_samples))
        put("recharge_samples.csv", write_points_csv(self.recharge_samples))
        put("wells.csv", write_observations_csv(self.observations))
        put("config.json", json.dumps(self.config(), indent=2, sort_keys=True) + "\n")
        return written


def _unit_field(rng, geometry: GridHeader, trend: float, n_bumps: int, noise: float) -> np.ndarray:
    """Smooth random field rescaled to [0, 1]."""
    nr, nc = geometry.shape
    yy, xx = np.meshgrid(np.linspace(0.0, 1.0, nr), np.linspace(0.0, 1.0, nc), indexing="ij")
    theta = rng.uniform(0.0, 2.0 * np.pi)
    f = trend * (np.cos(theta) * xx + np.sin(theta) * yy)
    for _ in range(n_bumps):
        cx, cy = rng.uniform(0.0, 1.0, size=2)
        sigma = rng.uniform(0.08, 0.3)
        amp = rng.uniform(-1.0, 1.0)
        f = f + amp * np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2.0 * sigma**2))
    f = f + noise * rng.standard_normal(f.shape)
    lo, hi = f.min(), f.max()
    return (f - lo) / (hi - lo) if hi > lo else np.zeros_like(f)


def _sample_cells(rng, geometry: GridHeader, n: int) -> np.ndarray:
    ncells = geometry.ncols * geometry.nrows
    if n > ncells:
        raise ValueError(f"cannot place {n} distinct points on {ncells} cells")
    return np.sort(rng.choice(ncells, size=n, replace=False))


def generate(scenario: SyntheticScenario = SyntheticScenario(), threads: int | None = 1) -> SyntheticData:
    geometry = scenario.geometry
    if scenario.n_wells < 1:
        raise ValueError("need at least one well")
    rng = np.random.default_rng(scenario.seed)
    schemes = standard_schemes()
    layers: dict[str, Grid] = {}
    samples = {}

    for p in DRASTIC_LU_PARAMETERS:
        trend, n_bumps, noise = scenario.layer_specs[p]
        u = _unit_field(rng, geometry, trend, n_bumps, noise)
        scheme = schemes[p]
        if scheme.mode == "continuous":
            lo, hi = scheme.entries[0].lower, scheme.entries[-1].upper
            margin = 0.1 if p in ("D", "R") else 0.01
            span = (hi - lo) * (1.0 - 2.0 * margin)
            phys = lo + (hi - lo) * margin + span * u
        else:
            codes = np.array([e.code for e in scheme.entries], dtype=np.float64)
            band = np.minimum((u * len(codes)).astype(np.int64), len(codes) - 1)
            phys = codes[band]
        if p in ("D", "R"):
            n = scenario.n_depth_samples if p == "D" else scenario.n_recharge_samples
            cells = _sample_cells(rng, geometry, n)
            rows, cols = np.divmod(cells, geometry.ncols)
            pts = []
            for r, c in zip(rows.tolist(), cols.tolist()):
                x, y = geometry.cell_center(r, c)
                pts.append(SamplePoint(x, y, round(float(phys[r, c]), 4)))
            samples[p] = pts
            spec = DEPTH_INTERPOLATION if p == "D" else RECHARGE_INTERPOLATION
            layers[p] = interpolate_layer(pts, geometry, threads=threads, **spec)
        else:
            layers[p] = Grid(geometry, phys)

    ratings = [apply_rating(layers[p], schemes[p]).grid for p in DRASTIC_LU_PARAMETERS]
    planted = weighted_sum(list(zip(ratings, scenario.planted_weights)))

    vals = planted.valid_values()
    center, scale = float(np.median(vals)), float(vals.std()) or 1.0
    cells = _sample_cells(rng, geometry, scenario.n_wells)
    jitter = rng.uniform(-0.4, 0.4, size=(scenario.n_wells, 2)) * geometry.cellsize
    draws = rng.random(scenario.n_wells)
    amounts = rng.random(scenario.n_wells)
    obs = []
    for i, cell in enumerate(cells.tolist()):
        r, c = divmod(cell, geometry.ncols)
        x, y = geometry.cell_center(r, c)
        z = (planted.values[r, c] - center) / scale
        if np.isinf(scenario.steepness):
            prob = 1.0 if z > 0 else 0.0
        else:
            prob = 1.0 / (1.0 + np.exp(-scenario.steepness * z))
        if draws[i] < prob:
            nitrate = 50.5 + 249.5 * amounts[i]
        else:
            nitrate = 49.5 * amounts[i]
        obs.append(Observation(round(x + jitter[i, 0], 3), round(y + jitter[i, 1], 3), round(float(nitrate), 2)))

    return SyntheticData(scenario, layers, samples["D"], samples["R"], obs, planted)
