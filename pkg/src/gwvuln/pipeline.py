"""Configuration-driven end-to-end workflow.

Stages run in a fixed order: load layers (interpolating point sets where
configured), rate, derive weights, overlay, classify, validate, render and
report. Artifacts are written to a scratch directory next to the output
directory and moved into place only when every stage succeeded.

Configuration (JSON, relative paths resolve against the config file)::

    {
      "geometry": {"ncols": 200, "nrows": 200, "xllcorner": 0, "yllcorner": 0,
                   "cellsize": 50, "nodata_value": -9999},
      "layers": {"A": {"grid": "a.asc"},
                 "D": {"points": "depth.csv", "method": "idw", "power": 2, "k": 12},
                 "R": {"points": "recharge.csv", "method": "kriging",
                       "variogram": {"shape": "spherical", "n_lags": 12}}},
      "ratings": "standard" | {"D": {<rating scheme>}, ...},
      "weights": "standard" | {"drastic": {"weights": [...]},
                               "drastic_lu": {"weights": [...]},
                               "ahp_lu": {"priorities": [...]} | {"matrix": [[...]]},
                               "fuzzy_ahp_lu": {"fuzzy_matrix": "standard" | [[[l, m, u], ...]]}},
      "schemes": ["drastic", "drastic_lu", "ahp_lu", "fuzzy_ahp_lu"],
      "classification": {"k": 5, "per_scheme": {"drastic": 3}},
      "validation": {"wells": "wells.csv", "threshold": 50,
                     "high_set": [4, 5], "low_set": [1, 2, 3]},
      "output": {"dir": "out", "palette": [[0, 128, 0], ...]}
    }
"""
from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import shutil
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from gwvuln.classification import RatingScheme, apply_rating
from gwvuln.grid import GridHeader, format_number, load_grid, write_ascii_grid
from gwvuln.index import SCHEMES, IndexModel, build_vulnerability_map, class_area_summary, scheme_parameters
from gwvuln.interpolation import interpolate_layer, load_points
from gwvuln.render import default_palette, png_bytes, render_map
from gwvuln.tables import DRASTIC_LU_PARAMETERS, DRASTIC_WEIGHTS, STANDARD_FUZZY_MATRIX, standard_schemes
from gwvuln.validation import (
    NITRATE_LIMIT_MG_L, load_observations, roc_auc, score_wells, write_roc_csv, zone_coincidence,
)
from gwvuln.weights import (
    FuzzyPairwiseMatrix, PairwiseMatrix, ahp_weights, consistency, fuzzy_ahp_weights, matrix_from_priorities,
)

log = logging.getLogger(__name__)

REPORT_COLUMNS = ("scheme", "auc", "n_pos", "n_neg", "pct_high_area", "pct_pos_in_high",
                  "pct_neg_in_low", "n_skipped")


class ConfigError(ValueError):
    """Invalid configuration or unreadable input (exit code 1)."""


class PipelineError(RuntimeError):
    """A computation stage failed (exit code 2)."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"[{stage}] {message}")


@dataclass
class PipelineConfig:
    layers: dict
    schemes: tuple
    geometry: GridHeader | None = None
    ratings: dict = field(default_factory=standard_schemes)
    weights: dict = field(default_factory=dict)
    k: int = 5
    k_per_scheme: dict = field(default_factory=dict)
    wells: Path | None = None
    threshold: float = NITRATE_LIMIT_MG_L
    high_set: tuple | None = None
    low_set: tuple | None = None
    out_dir: Path = Path("out")
    palette: tuple | None = None

    def k_for(self, scheme: str) -> int:
        return int(self.k_per_scheme.get(scheme, self.k))


def parse_config(doc: dict, base_dir=".") -> PipelineConfig:
    base = Path(base_dir)
    try:
        geometry = GridHeader(**doc["geometry"]) if doc.get("geometry") else None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"geometry: {exc}") from None

    layers = {}
    for p, spec in (doc.get("layers") or {}).items():
        if p not in DRASTIC_LU_PARAMETERS:
            raise ConfigError(f"layers: unknown parameter {p!r}")
        spec = dict(spec)
        if ("grid" in spec) == ("points" in spec):
            raise ConfigError(f"layers.{p}: give exactly one of 'grid' or 'points'")
        key = "grid" if "grid" in spec else "points"
        spec[key] = base / spec[key]
        if key == "points":
            spec.setdefault("method", "idw")
            if spec["method"] not in ("idw", "kriging"):
                raise ConfigError(f"layers.{p}: unknown method {spec['method']!r}")
        layers[p] = spec

    schemes = tuple(doc.get("schemes") or SCHEMES)
    unknown = [s for s in schemes if s not in SCHEMES]
    if unknown:
        raise ConfigError(f"schemes: unknown scheme(s) {', '.join(unknown)}")
    schemes = tuple(s for s in SCHEMES if s in schemes)

    ratings = standard_schemes()
    rdoc = doc.get("ratings", "standard")
    if isinstance(rdoc, dict):
        for p, sdoc in rdoc.items():
            try:
                ratings[p] = RatingScheme.from_dict({"parameter": p, **sdoc})
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"ratings.{p}: {exc}") from None
    elif rdoc != "standard":
        raise ConfigError("ratings must be 'standard' or a mapping")

    wdoc = doc.get("weights", "standard")
    if wdoc == "standard":
        wdoc = {}
    if not isinstance(wdoc, dict):
        raise ConfigError("weights must be 'standard' or a mapping")

    cls = doc.get("classification") or {}
    k = int(cls.get("k", 5))
    per = {s: int(v) for s, v in (cls.get("per_scheme") or {}).items()}
    if k < 1 or any(v < 1 for v in per.values()):
        raise ConfigError("classification: k must be >= 1")

    val = doc.get("validation") or {}
    out = doc.get("output") or {}
    palette = tuple(tuple(c) for c in out["palette"]) if out.get("palette") else None
    return PipelineConfig(
        layers=layers, schemes=schemes, geometry=geometry, ratings=ratings, weights=wdoc,
        k=k, k_per_scheme=per,
        wells=base / val["wells"] if val.get("wells") else None,
        threshold=float(val.get("threshold", NITRATE_LIMIT_MG_L)),
        high_set=tuple(val["high_set"]) if val.get("high_set") is not None else None,
        low_set=tuple(val["low_set"]) if val.get("low_set") is not None else None,
        out_dir=base / out.get("dir", "out"),
        palette=palette,
    )


def load_config(path) -> PipelineConfig:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(doc, path.parent)


def preflight(cfg: PipelineConfig) -> None:
    """Check every input before any computation starts."""
    if not cfg.schemes:
        raise ConfigError("no scheme enabled")
    for s in cfg.schemes:
        missing = [p for p in scheme_parameters(s) if p not in cfg.layers]
        if missing:
            raise ConfigError(f"scheme {s} needs layer(s) {', '.join(missing)} which the config does not define")
    needed = {p for s in cfg.schemes for p in scheme_parameters(s)}
    for p in sorted(needed):
        spec = cfg.layers[p]
        src = spec.get("grid") or spec.get("points")
        if not Path(src).is_file():
            raise ConfigError(f"layer {p}: input file not found: {src}")
        if "points" in spec and cfg.geometry is None:
            raise ConfigError(f"layer {p} is interpolated but the config has no 'geometry'")
        if p not in cfg.ratings:
            raise ConfigError(f"no rating scheme for layer {p}")
    if cfg.wells is not None and not cfg.wells.is_file():
        raise ConfigError(f"validation wells file not found: {cfg.wells}")
    if not cfg.threshold > 0:
        raise ConfigError("validation threshold must be positive")
    if cfg.palette is not None:
        for s in cfg.schemes:
            if len(cfg.palette) < cfg.k_for(s):
                raise ConfigError(f"palette has {len(cfg.palette)} colours but {s} uses {cfg.k_for(s)} classes")
    for s in cfg.schemes:
        _scheme_weights(cfg, s)


def _scheme_weights(cfg: PipelineConfig, scheme: str):
    """Weights for one scheme plus consistency info for crisp AHP."""
    params = scheme_parameters(scheme)
    spec = cfg.weights.get(scheme, {})
    try:
        if scheme in ("drastic", "drastic_lu"):
            w = spec.get("weights") or [DRASTIC_WEIGHTS[p] for p in params]
            if len(w) != len(params) or any(x <= 0 for x in w):
                raise ConfigError(f"weights.{scheme}: need {len(params)} positive weights")
            return tuple(float(x) for x in w), None
        if scheme == "ahp_lu":
            if "matrix" in spec:
                pm = PairwiseMatrix(spec["matrix"], params)
            else:
                pm = matrix_from_priorities(spec.get("priorities") or [DRASTIC_WEIGHTS[p] for p in params], params)
            if pm.n != len(params):
                raise ConfigError(f"weights.{scheme}: matrix must be {len(params)}x{len(params)}")
            wv = ahp_weights(pm)
            return wv.w, consistency(pm, wv)
        fm_doc = spec.get("fuzzy_matrix", "standard")
        fm = FuzzyPairwiseMatrix(STANDARD_FUZZY_MATRIX if fm_doc == "standard" else fm_doc, params)
        return fuzzy_ahp_weights(fm).w, None
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"weights.{scheme}: {exc}") from None


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format_number(v) if math.isfinite(v) else ""
    return str(v)


def _zone_sets(cfg: PipelineConfig, labels: tuple):
    """Class ids counted as high and low zones; defaults follow the class labels."""
    k = len(labels)
    ids = range(1, k + 1)
    high = tuple(i for i in ids if labels[i - 1] in ("high", "very high"))
    if not high:
        high = tuple(range(max(k - 1, 1), k + 1)) if k >= 3 else (k,)
    if cfg.high_set is not None:
        high = tuple(cfg.high_set)
    if cfg.low_set is not None:
        low = tuple(cfg.low_set)
        if cfg.high_set is None:
            high = tuple(i for i in ids if i not in low)
    else:
        low = tuple(i for i in ids if i not in high)
    return high, low


@dataclass
class SchemeResult:
    scheme: str
    auc: float | None = None
    n_pos: int | None = None
    n_neg: int | None = None
    pct_high_area: float | None = None
    pct_pos_in_high: float | None = None
    pct_neg_in_low: float | None = None
    n_skipped: int | None = None

    def row(self) -> list[str]:
        return [_fmt(getattr(self, c)) for c in REPORT_COLUMNS]


def emit_report(results: list[SchemeResult]) -> dict[str, str]:
    """CSV and plain-text report, rows in the fixed scheme order."""
    if not results:
        raise ValueError("no scheme results to report")
    order = {s: i for i, s in enumerate(SCHEMES)}
    results = sorted(results, key=lambda r: order.get(r.scheme, len(order)))
    csv_lines = [",".join(REPORT_COLUMNS)] + [",".join(r.row()) for r in results]

    def pct(v):
        return "n/a" if v is None else f"{v:6.2f} %"

    txt = ["Vulnerability model validation", ""]
    txt.append(f"{'scheme':<14}{'AUC':>8}{'pos':>6}{'neg':>6}{'high area':>12}{'pos in high':>14}{'neg in low':>13}")
    for r in results:
        auc = "n/a" if r.auc is None else f"{r.auc:.3f}"
        txt.append(f"{r.scheme:<14}{auc:>8}{_fmt(r.n_pos):>6}{_fmt(r.n_neg):>6}"
                   f"{pct(r.pct_high_area):>12}{pct(r.pct_pos_in_high):>14}{pct(r.pct_neg_in_low):>13}")
    return {"report.csv": "\n".join(csv_lines) + "\n", "report.txt": "\n".join(txt) + "\n"}


@dataclass
class RunResult:
    out_dir: Path
    artifacts: dict
    results: list
    maps: dict


def _load_layers(cfg: PipelineConfig, needed, threads):
    layers, interpolated = {}, set()
    for p in [q for q in DRASTIC_LU_PARAMETERS if q in needed]:
        spec = cfg.layers[p]
        if "grid" in spec:
            try:
                layers[p] = load_grid(spec["grid"])
            except (OSError, ValueError) as exc:
                raise ConfigError(f"[load] layer {p} ({spec['grid']}): {exc}") from None
            continue
        try:
            pts = load_points(spec["points"])
        except (OSError, ValueError) as exc:
            raise ConfigError(f"[load] layer {p} ({spec['points']}): {exc}") from None
        params = {k: v for k, v in spec.items() if k not in ("points", "method")}
        try:
            layers[p] = interpolate_layer(pts, cfg.geometry, spec["method"], threads=threads, **params)
        except (ValueError, ArithmeticError) as exc:
            raise PipelineError("interpolate", f"layer {p}: {exc}") from exc
        interpolated.add(p)
    return layers, interpolated


def run_pipeline(cfg: PipelineConfig, out_dir=None, threads: int | None = 1) -> RunResult:
    """Run every enabled scheme and write the artifact set plus a manifest."""
    preflight(cfg)
    out_dir = Path(out_dir) if out_dir is not None else cfg.out_dir
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    files: dict[str, bytes] = {}

    def put(name, data):
        files[name] = data.encode("utf-8") if isinstance(data, str) else data

    needed = {p for s in cfg.schemes for p in scheme_parameters(s)}
    layers, interpolated = _load_layers(cfg, needed, threads)
    for p in sorted(interpolated):
        put(f"layer_{p}.asc", write_ascii_grid(layers[p]))

    ratings = {}
    for p in [q for q in DRASTIC_LU_PARAMETERS if q in needed]:
        rated = apply_rating(layers[p], cfg.ratings[p])
        if rated.n_unrated:
            log.warning("layer %s: %d cells outside the rating table", p, rated.n_unrated)
        ratings[p] = rated.grid
        put(f"rating_{p}.asc", write_ascii_grid(rated.grid))

    obs = None
    if cfg.wells is not None:
        try:
            obs = load_observations(cfg.wells)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"[load] wells ({cfg.wells}): {exc}") from None

    weight_rows = ["scheme,parameter,weight"]
    area_rows = ["scheme,class,label,cells,percent"]
    results, maps = [], {}
    for s in cfg.schemes:
        w, cons = _scheme_weights(cfg, s)
        params = scheme_parameters(s)
        weight_rows += [f"{s},{p},{format_number(x)}" for p, x in zip(params, w)]
        if cons is not None:
            log.info("%s: lambda_max=%.6f CI=%.3g CR=%.3g", s, cons.lambda_max, cons.ci, cons.cr)
            if not cons.acceptable:
                log.warning("%s: consistency ratio %.3f exceeds 0.1", s, cons.cr)
        try:
            model = IndexModel(s, w, {p: ratings[p] for p in params})
            vm = build_vulnerability_map(model, cfg.k_for(s))
        except ValueError as exc:
            raise PipelineError("index", f"{s}: {exc}") from exc
        maps[s] = vm
        put(f"vi_{s}.asc", write_ascii_grid(vm.vi))
        put(f"classes_{s}.asc", write_ascii_grid(vm.classes))
        summary = class_area_summary(vm.classes, vm.breaks.k)
        for row in summary.rows:
            area_rows.append(f"{s},{row.class_id},{vm.breaks.labels[row.class_id - 1]},{row.cells},"
                             f"{format_number(row.percent)}")
        palette = cfg.palette or default_palette(vm.breaks.k)
        try:
            put(f"map_{s}.png", png_bytes(render_map(vm.classes, palette)))
        except ValueError as exc:
            raise PipelineError("render", f"{s}: {exc}") from exc

        res = SchemeResult(s)
        if obs is not None:
            high, low = _zone_sets(cfg, vm.breaks.labels)
            zm = zone_coincidence(vm.classes, obs, cfg.threshold, high, low)
            res.pct_high_area, res.pct_pos_in_high, res.pct_neg_in_low = (
                zm.pct_high_area, zm.pct_pos_in_high, zm.pct_neg_in_low)
            try:
                sw = score_wells(vm.vi, obs, cfg.threshold)
            except ValueError as exc:
                raise PipelineError("validate", f"{s}: {exc}") from exc
            res.n_pos = sum(sw.labels)
            res.n_neg = len(sw.labels) - res.n_pos
            res.n_skipped = sw.n_skipped
            if res.n_pos and res.n_neg:
                roc = roc_auc(sw.scores, sw.labels)
                res.auc = roc.auc
                put(f"roc_{s}.csv", write_roc_csv(roc))
        results.append(res)

    put("weights.csv", "\n".join(weight_rows) + "\n")
    put("area_summary.csv", "\n".join(area_rows) + "\n")
    for name, text in emit_report(results).items():
        put(name, text)
    manifest = {"files": [{"path": n, "sha256": hashlib.sha256(files[n]).hexdigest()} for n in sorted(files)]}
    put("manifest.json", json.dumps(manifest, indent=2) + "\n")

    tmp = Path(tempfile.mkdtemp(prefix=f".{out_dir.name}-", dir=out_dir.parent))
    try:
        for name, data in files.items():
            (tmp / name).write_bytes(data)
        out_dir.mkdir(exist_ok=True)
        for name in files:
            os.replace(tmp / name, out_dir / name)
    finally:
        shutil.rmtree(tmp, ignore_errors=True)
    return RunResult(out_dir, {n: out_dir / n for n in sorted(files)}, results, maps)
