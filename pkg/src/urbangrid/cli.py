"""Command-line entry point: synth | labelgen | train1 | train2 | infer |
eval | compare | gradcheck.

Exit status is 0 on success, 1 on usage errors, and 2 on data/format
errors (including a failed gradient check).  `--threads N` caps BLAS
parallelism and must take effect before numpy loads, so this module
defers all numeric imports until after the flag is handled; `--threads 1`
is the bitwise-reproducible reference path.
"""

import argparse
import os
import sys

_THREAD_ENV = (
    "OPENBLAS_NUM_THREADS",
    "OMP_NUM_THREADS",
    "MKL_NUM_THREADS",
    "VECLIB_MAXIMUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)

_GRID_FILES = {"land": "land.csv", "bd": "bd.csv", "far": "far.csv",
               "pop": "pop.csv"}


def _apply_threads(argv):
    """Honor --threads before any numpy import."""
    n = None
    for i, arg in enumerate(argv):
        if arg == "--threads" and i + 1 < len(argv):
            n = argv[i + 1]
        elif arg.startswith("--threads="):
            n = arg.split("=", 1)[1]
    if n is None:
        return
    try:
        if int(n) < 1:
            return
    except ValueError:
        return  # the parser reports the usage error
    for var in _THREAD_ENV:
        os.environ[var] = str(int(n))


class _Parser(argparse.ArgumentParser):
    """argparse, but usage errors exit 1 (2 is reserved for data errors)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    common.add_argument("--threads", type=int, default=None,
                        help="cap BLAS threads (1 = bitwise reference path)")
    common.add_argument("--config", default=None,
                        help="key=value run configuration file")

    parser = _Parser(prog="urbangrid",
                     description="multi-task land-use / density mapping")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("synth", parents=[common],
                       help="generate a synthetic city (raster + polygons)")
    p.add_argument("--rows", type=int, default=8)
    p.add_argument("--cols", type=int, default=8)
    p.add_argument("--out", required=True, help="city directory to create")

    p = sub.add_parser("labelgen", parents=[common],
                       help="polygon data -> per-cell label grids")
    p.add_argument("--in", dest="indir", required=True, help="city directory")
    p.add_argument("--out", required=True, help="label directory to create")

    p = sub.add_parser("train1", parents=[common],
                       help="stage-1 training (land, bd, far)")
    p.add_argument("--raster", required=True, help="MCR1 city raster")
    p.add_argument("--labels", required=True, help="label directory")
    p.add_argument("--out", required=True, help="checkpoint to write")
    p.add_argument("--epochs", type=int, default=None,
                   help="override epochs_stage1")

    p = sub.add_parser("train2", parents=[common],
                       help="stage-2 training (adds population)")
    p.add_argument("--raster", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--init", required=True, help="stage-1 checkpoint")
    p.add_argument("--out", required=True, help="checkpoint to write")
    p.add_argument("--epochs", type=int, default=None,
                   help="override epochs_stage2")

    p = sub.add_parser("infer", parents=[common],
                       help="run a checkpoint over a raster")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--raster", required=True)
    p.add_argument("--out", required=True, help="product directory")
    p.add_argument("--expected-value", action="store_true",
                   help="decode probability-weighted midpoints instead of argmax")

    p = sub.add_parser("eval", parents=[common],
                       help="score a product directory against truth grids")
    p.add_argument("--products", required=True)
    p.add_argument("--truth", required=True, help="label directory")
    p.add_argument("--out", default=None, help="optional metrics CSV")

    p = sub.add_parser("compare", parents=[common],
                       help="change analysis between two products")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out", required=True, help="report directory")

    sub.add_parser("gradcheck", parents=[common],
                   help="finite-difference check of every adjoint")
    return parser


def _seed(args, config):
    return config["seed"] if args.seed is None else args.seed


def _read_label_grids(directory, kinds=None):
    """Label directory -> {LabelKind: LabelGrid} (missing kinds skipped)."""
    from .geolabel.grids import read_grid_csv, read_gridspec_csv
    from .taxonomy import LabelKind

    spec = read_gridspec_csv(os.path.join(directory, "gridspec.csv"))
    grids = {}
    for kind in kinds or LabelKind:
        path = os.path.join(directory, _GRID_FILES[kind.value])
        if os.path.exists(path):
            grids[kind] = read_grid_csv(path, spec, kind)
    if not grids:
        from .errors import DataError
        raise DataError(f"{directory}: no label grids found")
    return grids


def _cmd_synth(args, config):
    from .geolabel.synth import synthesize_city
    from .geolabel.vectors import write_features
    from .mapper.raster import write_raster

    city = synthesize_city(_seed(args, config), args.rows, args.cols)
    os.makedirs(args.out, exist_ok=True)
    raster_path = os.path.join(args.out, config["raster_file"])
    features_path = os.path.join(args.out, config["features_file"])
    write_raster(raster_path, city.raster)
    write_features(features_path, city.features())
    print(f"synth: {args.rows}x{args.cols} cells, "
          f"{city.raster.height}x{city.raster.width} px raster, "
          f"{len(city.buildings)} buildings -> {args.out}")
    return 0


def _cmd_labelgen(args, config):
    from .geolabel.dataset import assemble_dataset
    from .geolabel.grids import (building_density_grid, floor_area_ratio_grid,
                                 landuse_grid, population_grid,
                                 write_grid_csv, write_gridspec_csv)
    from .geolabel.vectors import FeatureKind, read_features
    from .mapper.raster import read_raster
    from .mapper.tiling import grid_for_raster
    from .runconfig import discretization_specs

    raster = read_raster(os.path.join(args.indir, config["raster_file"]))
    features = read_features(os.path.join(args.indir, config["features_file"]))
    grid = grid_for_raster(raster, cell_size=config["cell_size"])
    buildings = [f for f in features if f.kind == FeatureKind.BUILDING]
    blocks = [f for f in features if f.kind == FeatureKind.BLOCK]
    zones = [f for f in features if f.kind == FeatureKind.LANDUSE]
    grids = {
        "land": landuse_grid(zones, grid),
        "bd": building_density_grid(buildings, grid),
        "far": floor_area_ratio_grid(buildings, grid),
        "pop": population_grid(blocks, grid),
    }
    os.makedirs(args.out, exist_ok=True)
    write_gridspec_csv(os.path.join(args.out, "gridspec.csv"), grid)
    for name, label_grid in grids.items():
        write_grid_csv(os.path.join(args.out, _GRID_FILES[name]), label_grid)
    samples = assemble_dataset(raster, list(grids.values()),
                               seed=_seed(args, config),
                               specs=discretization_specs(config))
    print(f"labelgen: {grid.rows}x{grid.cols} cells, "
          f"{len(samples)} samples -> {args.out}")
    return 0


def _train_common(args, config, kinds):
    import dataclasses

    from .geolabel.dataset import assemble_dataset
    from .mapper.raster import read_raster
    from .runconfig import discretization_specs, train_config

    raster = read_raster(args.raster)
    grids = _read_label_grids(args.labels, kinds)
    tconfig = train_config(config)
    if args.seed is not None:
        tconfig = dataclasses.replace(tconfig, seed=args.seed)
    samples = assemble_dataset(raster, list(grids.values()), seed=tconfig.seed,
                               specs=discretization_specs(config))
    return tconfig, samples


def _print_history(stage, history):
    for epoch, loss in enumerate(history):
        print(f"{stage} epoch {epoch}: mean loss {loss!r}")


def _cmd_train1(args, config):
    import dataclasses

    from .net.checkpoint import save_checkpoint
    from .net.model import build_network
    from .net.train import train_stage1
    from .runconfig import network_config
    from .taxonomy import LabelKind

    kinds = (LabelKind.LAND, LabelKind.BD, LabelKind.FAR)
    tconfig, samples = _train_common(args, config, kinds)
    if args.epochs is not None:
        tconfig = dataclasses.replace(tconfig, epochs_stage1=args.epochs)
    net = build_network(network_config(config), seed=tconfig.seed)
    history = train_stage1(net, samples, tconfig)
    save_checkpoint(net, args.out)
    _print_history("stage1", history)
    print(f"train1: {len(samples)} samples, {len(history)} epochs -> {args.out}")
    return 0


def _cmd_train2(args, config):
    import dataclasses

    from .net.checkpoint import load_checkpoint, save_checkpoint
    from .net.train import train_stage2

    tconfig, samples = _train_common(args, config, None)
    if args.epochs is not None:
        tconfig = dataclasses.replace(tconfig, epochs_stage2=args.epochs)
    net = load_checkpoint(args.init)
    history = train_stage2(net, samples, tconfig)
    save_checkpoint(net, args.out)
    _print_history("stage2", history)
    print(f"train2: {len(samples)} samples, {len(history)} epochs -> {args.out}")
    return 0


def _cmd_infer(args, config):
    from .mapper.products import predict_products, write_products
    from .mapper.raster import read_raster
    from .net.checkpoint import load_checkpoint
    from .runconfig import discretization_specs

    net = load_checkpoint(args.checkpoint)
    raster = read_raster(args.raster)
    product = predict_products(net, raster,
                               expected_value=args.expected_value,
                               specs=discretization_specs(config))
    write_products(product, args.out)
    print(f"infer: {product.grid.rows}x{product.grid.cols} cells -> {args.out}")
    return 0


def _cmd_eval(args, config):
    from .mapper.products import read_products
    from .metrics import accuracy_report, confusion_matrix, mae, pearson_r
    from .taxonomy import LabelKind

    product = read_products(args.products)
    truth = _read_label_grids(args.truth)
    rows = []
    if LabelKind.LAND in truth:
        report = accuracy_report(confusion_matrix(product.land,
                                                  truth[LabelKind.LAND]))
        rows.append(("land_oa", report.overall_accuracy))
        rows.append(("land_kappa", report.kappa))
    for kind, layer in ((LabelKind.BD, product.bd), (LabelKind.FAR, product.far),
                        (LabelKind.POP, product.pop)):
        if kind in truth:
            r = pearson_r(layer, truth[kind])
            rows.append((f"{kind.value}_mae", mae(layer, truth[kind])))
            rows.append((f"{kind.value}_r", r))
    for name, value in rows:
        print(f"{name} {'' if value is None else repr(value)}")
    if args.out:
        with open(args.out, "w", encoding="ascii", newline="\n") as fh:
            fh.write("metric,value\n")
            for name, value in rows:
                fh.write(f"{name},{'' if value is None else repr(value)}\n")
    return 0


def _cmd_compare(args, config):
    from .mapper.products import read_products
    from .metrics import compare_products, write_change_report
    from .taxonomy import LabelKind

    report = compare_products(read_products(args.a), read_products(args.b))
    paths = write_change_report(report, args.out)
    print(f"compare: land agreement {report.agreement_fraction!r}, "
          f"bd/far/pop MAE "
          f"{report.layer_mae[LabelKind.BD]!r}/"
          f"{report.layer_mae[LabelKind.FAR]!r}/"
          f"{report.layer_mae[LabelKind.POP]!r}; "
          f"{len(paths)} files -> {args.out}")
    return 0


def _cmd_gradcheck(args, config):
    from .net import fdcheck
    from .numerics.gradcheck import run_op_checks

    seed = _seed(args, config)
    failures = 0
    for name, err in run_op_checks(seed).items():
        print(f"op {name}: max relative error {err:.3e}")
        failures += err >= 1e-4
    for stage in (1, 2):
        errs = fdcheck.check_loss_gradients(stage, seed=seed)
        worst = max(errs.values())
        print(f"stage-{stage} objective: max relative error {worst:.3e} "
              f"(over {len(errs)} parameters)")
        failures += worst >= 1e-4
    if failures:
        print(f"gradcheck: {failures} check(s) at or above 1e-4", file=sys.stderr)
        return 2
    print("gradcheck: all checks below 1e-4")
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "labelgen": _cmd_labelgen,
    "train1": _cmd_train1,
    "train2": _cmd_train2,
    "infer": _cmd_infer,
    "eval": _cmd_eval,
    "compare": _cmd_compare,
    "gradcheck": _cmd_gradcheck,
}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    _apply_threads(argv)
    args = build_parser().parse_args(argv)

    from .errors import DataError, FormatError, ShapeError
    from .runconfig import load_config

    try:
        config = load_config(args.config)
        return _COMMANDS[args.command](args, config)
    except (DataError, FormatError, ShapeError) as exc:
        print(f"urbangrid {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"urbangrid {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
