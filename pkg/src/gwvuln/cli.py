"""Command-line interface.

Exit codes: 0 success, 1 configuration or input error, 2 computation error.
Logs go to standard error; artifacts go to ``--out-dir``.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from gwvuln import pipeline as pl
from gwvuln.classification import apply_rating, classify, jenks_breaks
from gwvuln.grid import GridFormatError, GridHeader, load_grid, save_grid
from gwvuln.index import SCHEMES, IndexModel, compute_index, scheme_parameters
from gwvuln.interpolation import interpolate_layer, load_points
from gwvuln.render import png_bytes, render_map
from gwvuln.synthetic import SyntheticScenario, generate
from gwvuln.tables import standard_schemes
from gwvuln.validation import load_observations, roc_auc, score_wells, write_roc_csv, zone_coincidence

log = logging.getLogger("gwvuln")


class InputError(ValueError):
    pass


def _out_dir(args) -> Path:
    out = Path(args.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(args):
    scenario = SyntheticScenario(
        seed=args.seed if args.seed is not None else SyntheticScenario.seed,
        ncols=args.size, nrows=args.size, n_wells=args.wells,
        steepness=float(args.steepness),
    )
    data = generate(scenario, threads=args.threads)
    out = _out_dir(args)
    for name in data.write(out):
        log.info("wrote %s", out / name)


def _geometry(args) -> GridHeader:
    if args.template:
        return load_grid(args.template).header
    if args.ncols is None or args.nrows is None or args.cellsize is None:
        raise InputError("give --template or all of --ncols/--nrows/--cellsize")
    return GridHeader(args.ncols, args.nrows, args.xllcorner, args.yllcorner, args.cellsize)


def cmd_interpolate(args):
    pts = load_points(args.points)
    params = {"power": args.power, "k": args.k} if args.method == "idw" else {
        "variogram": {"shape": args.shape, "n_lags": args.n_lags, "max_dist": args.max_dist}}
    g = interpolate_layer(pts, _geometry(args), args.method, threads=args.threads, **params)
    save_grid(g, _out_dir(args) / args.output)


def cmd_rate(args):
    schemes = pl.load_config(args.config).ratings if args.config else standard_schemes()
    if args.parameter not in schemes:
        raise InputError(f"no rating scheme for parameter {args.parameter}")
    rated = apply_rating(load_grid(args.grid), schemes[args.parameter])
    save_grid(rated.grid, _out_dir(args) / (args.output or f"rating_{args.parameter}.asc"))
    print(f"{args.parameter}: {rated.n_unrated} cell(s) outside the rating table")


def cmd_weights(args):
    cfg = pl.load_config(args.config) if args.config else pl.parse_config({"layers": {}})
    rows = []
    for s in args.scheme or SCHEMES:
        w, cons = pl._scheme_weights(cfg, s)
        rows.append({"scheme": s, "weights": dict(zip(scheme_parameters(s), w)),
                     **({"lambda_max": cons.lambda_max, "ci": cons.ci, "cr": cons.cr,
                         "acceptable": cons.acceptable} if cons else {})})
    print(json.dumps(rows, indent=2))


def _rating_layers(args, scheme):
    layers = {}
    for spec in args.layer:
        name, _, path = spec.partition("=")
        if not path:
            raise InputError(f"--layer expects PARAM=PATH, got {spec!r}")
        layers[name] = load_grid(path)
    w, _ = pl._scheme_weights(pl.load_config(args.config) if args.config else
                              pl.parse_config({"layers": {}}), scheme)
    return IndexModel(scheme, w, layers)


def cmd_index(args):
    if args.config and not args.layer:
        res = pl.run_pipeline(pl.load_config(args.config), out_dir=args.out_dir, threads=args.threads)
        for s, vm in res.maps.items():
            log.info("%s: VI range %.4g..%.4g", s, vm.vi.valid_values().min(), vm.vi.valid_values().max())
        return
    vi = compute_index(_rating_layers(args, args.scheme))
    save_grid(vi, _out_dir(args) / (args.output or f"vi_{args.scheme}.asc"))


def cmd_classify(args):
    g = load_grid(args.grid)
    cb = jenks_breaks(g.valid_values(), args.k)
    save_grid(classify(g, cb), _out_dir(args) / args.output)
    print(json.dumps({"breaks": cb.breaks, "labels": cb.labels}))


def _fmt(v):
    return None if v is None else round(v, 6)


def cmd_validate(args):
    obs = load_observations(args.wells)
    vi = load_grid(args.vi)
    sw = score_wells(vi, obs, args.threshold)
    out = {"n_skipped": sw.n_skipped}
    if any(sw.labels) and not all(sw.labels):
        roc = roc_auc(sw.scores, sw.labels)
        (_out_dir(args) / args.roc_output).write_text(write_roc_csv(roc), encoding="utf-8")
        out.update(auc=roc.auc, n_pos=roc.n_pos, n_neg=roc.n_neg)
    else:
        out.update(auc=None)
    if args.classes:
        zm = zone_coincidence(load_grid(args.classes), obs, args.threshold,
                              args.high_set or (4, 5), args.low_set or (1, 2, 3))
        out.update(pct_high_area=_fmt(zm.pct_high_area), pct_pos_in_high=_fmt(zm.pct_pos_in_high),
                   pct_neg_in_low=_fmt(zm.pct_neg_in_low))
    print(json.dumps(out, indent=2))


def cmd_render(args):
    palette = json.loads(args.palette) if args.palette else None
    img = render_map(load_grid(args.grid), palette)
    (_out_dir(args) / args.output).write_bytes(png_bytes(img))


def cmd_run(args):
    if not args.config:
        raise InputError("run needs --config")
    res = pl.run_pipeline(pl.load_config(args.config), out_dir=args.out_dir, threads=args.threads)
    sys.stdout.write((res.out_dir / "report.txt").read_text(encoding="utf-8"))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="pipeline configuration (JSON)")
    common.add_argument("--out-dir", help="directory for artifacts")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads for per-cell stages (default: all cores)")
    common.add_argument("--seed", type=int, default=None, help="seed for synthetic data")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="gwvuln", parents=[common],
                                description="DRASTIC / DRASTIC-LU groundwater vulnerability mapping")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write a synthetic scenario")
    g.add_argument("--size", type=int, default=200)
    g.add_argument("--wells", type=int, default=70)
    g.add_argument("--steepness", default=SyntheticScenario.steepness)
    g.set_defaults(func=cmd_generate)

    g = sub.add_parser("interpolate", parents=[common], help="grid scattered points (IDW or kriging)")
    g.add_argument("--points", required=True)
    g.add_argument("--method", choices=("idw", "kriging"), default="idw")
    g.add_argument("--template", help="ASCII grid supplying the output geometry")
    g.add_argument("--ncols", type=int)
    g.add_argument("--nrows", type=int)
    g.add_argument("--xllcorner", type=float, default=0.0)
    g.add_argument("--yllcorner", type=float, default=0.0)
    g.add_argument("--cellsize", type=float)
    g.add_argument("--power", type=float, default=2.0)
    g.add_argument("--k", type=int, default=12)
    g.add_argument("--shape", choices=("spherical", "exponential", "gaussian"), default="spherical")
    g.add_argument("--n-lags", type=int, default=12)
    g.add_argument("--max-dist", type=float)
    g.add_argument("--output", default="interpolated.asc")
    g.set_defaults(func=cmd_interpolate)

    g = sub.add_parser("rate", parents=[common], help="rate a physical layer")
    g.add_argument("--grid", required=True)
    g.add_argument("--parameter", required=True, choices=("D", "R", "A", "S", "T", "I", "C", "LU"))
    g.add_argument("--output")
    g.set_defaults(func=cmd_rate)

    g = sub.add_parser("weights", parents=[common], help="print scheme weights and AHP consistency")
    g.add_argument("--scheme", action="append", choices=SCHEMES)
    g.set_defaults(func=cmd_weights)

    g = sub.add_parser("index", parents=[common], help="compute vulnerability index grids")
    g.add_argument("--scheme", choices=SCHEMES, default="drastic_lu")
    g.add_argument("--layer", action="append", default=[], metavar="PARAM=PATH",
                   help="rating grid per parameter")
    g.add_argument("--output")
    g.set_defaults(func=cmd_index)

    g = sub.add_parser("classify", parents=[common], help="Jenks-classify a grid")
    g.add_argument("--grid", required=True)
    g.add_argument("--k", type=int, default=5)
    g.add_argument("--output", default="classes.asc")
    g.set_defaults(func=cmd_classify)

    g = sub.add_parser("validate", parents=[common], help="ROC/AUC and zone coincidence")
    g.add_argument("--vi", required=True)
    g.add_argument("--wells", required=True)
    g.add_argument("--classes")
    g.add_argument("--threshold", type=float, default=50.0)
    g.add_argument("--high-set", type=int, nargs="+")
    g.add_argument("--low-set", type=int, nargs="+")
    g.add_argument("--roc-output", default="roc.csv")
    g.set_defaults(func=cmd_validate)

    g = sub.add_parser("render", parents=[common], help="render a class grid to PNG")
    g.add_argument("--grid", required=True)
    g.add_argument("--palette", help="JSON list of [r, g, b] colours, low class first")
    g.add_argument("--output", default="map.png")
    g.set_defaults(func=cmd_render)

    g = sub.add_parser("run", parents=[common], help="run the full pipeline from --config")
    g.set_defaults(func=cmd_run)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except (pl.ConfigError, InputError, GridFormatError, FileNotFoundError) as exc:
        log.error("%s", exc)
        return 1
    except pl.PipelineError as exc:
        log.error("%s", exc)
        return 2
    except (ValueError, ArithmeticError) as exc:
        log.error("computation failed: %s", exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
