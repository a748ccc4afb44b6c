"""Command line driver for the offline pipeline and the online service.

Subcommands: generate-snapshots, build-rb, train, build, evaluate, predict,
serve, report.  Configuration comes from one JSON file (--config) or a
named preset (--preset); the CALIBROM_MODEL environment variable may stand
in for --model.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .config import Config, load_config, preset, save_config
from .errors import CalibromError, ConfigurationError
from .fom import (
    SnapshotSet,
    biot_fourier_report,
    generate_snapshot_matrix,
    read_snapshot_store,
    write_snapshot_store,
)
from .geometry import rasterize
from .neural import init_mlp, train as train_mlp
from .reduction import ParamScaler, center, compute_basis, eigendecompose_spsd, gram, project_columns
from .rom import (
    PARAM_NAMES,
    build_rom,
    energy_spectrum_csv,
    evaluate,
    live_fom_oracle,
    load_bundle,
    predict,
    sample_params,
    save_bundle,
    store_oracle,
)
from .server import make_server

SPLITS = ("train", "val", "test")


def _config_from_args(args) -> Config:
    if getattr(args, "config", None):
        return load_config(args.config)
    return preset(getattr(args, "preset", "desk") or "desk")


def _model_path(args) -> Path:
    path = getattr(args, "model", None) or os.environ.get("CALIBROM_MODEL")
    if not path:
        raise ConfigurationError("no model given: pass --model or set CALIBROM_MODEL")
    return Path(path)


def _store_paths(store_dir: Path) -> dict:
    return {split: store_dir / f"{split}.snap" for split in SPLITS}


def _generate_stores(cfg: Config, store_dir: Path, workers: int) -> dict:
    store_dir.mkdir(parents=True, exist_ok=True)
    grid = rasterize(cfg.profile(), cfg.discretization.dx)
    stations_z = np.array(cfg.discretization.stored_stations(), dtype=float) * (
        cfg.geometry.l / (cfg.discretization.nz - 1)
    )
    splits = dict(zip(SPLITS, sample_params(cfg.sampling, cfg.t_inlet)))
    paths = _store_paths(store_dir)
    for split, params in splits.items():
        values = generate_snapshot_matrix(
            grid, cfg.material, cfg.discretization, params, workers=workers
        )
        sset = SnapshotSet(
            values=values,
            params=params,
            geometry_hash=cfg.geometry_hash(),
            discretization_hash=cfg.discretization_hash(),
            stations_z=stations_z,
            meta={"split": split, "config_name": cfg.name},
        )
        write_snapshot_store(paths[split], sset)
        print(f"wrote {paths[split]} ({values.shape[0]} x {values.shape[1]})")
    return paths


def _read_store(cfg: Config, store_dir: Path, split: str) -> SnapshotSet:
    path = _store_paths(store_dir)[split]
    sset = read_snapshot_store(path)
    if sset.geometry_hash != cfg.geometry_hash():
        raise ConfigurationError(f"{path}: geometry hash mismatch with configuration")
    if sset.discretization_hash != cfg.discretization_hash():
        raise ConfigurationError(f"{path}: discretization hash mismatch with configuration")
    return sset


def _ensure_stores(cfg: Config, store_dir: Path, workers: int) -> None:
    paths = _store_paths(store_dir)
    if all(p.exists() for p in paths.values()):
        return
    _generate_stores(cfg, store_dir, workers)


def cmd_generate_snapshots(args) -> int:
    cfg = _config_from_args(args)
    _generate_stores(cfg, Path(args.out), args.workers)
    return 0


def cmd_build_rb(args) -> int:
    cfg = _config_from_args(args)
    train_set = _read_store(cfg, Path(args.store), "train")
    mean, sc = center(train_set.values)
    vals, vecs = eigendecompose_spsd(gram(sc))
    basis = compute_basis(sc, vals, vecs, cfg.rom.n_modes, cfg.rom.tol_rank, mean_field=mean)
    energy_spectrum_csv(basis, args.out)
    print(f"wrote {args.out} ({basis.n_modes} retained modes)")
    return 0


def cmd_train(args) -> int:
    cfg = _config_from_args(args)
    train_set = _read_store(cfg, Path(args.store), "train")
    val_set = _read_store(cfg, Path(args.store), "val")
    mean, sc = center(train_set.values)
    vals, vecs = eigendecompose_spsd(gram(sc))
    basis = compute_basis(sc, vals, vecs, cfg.rom.n_modes, cfg.rom.tol_rank, mean_field=mean)
    if basis.n_modes == 0:
        raise ConfigurationError("snapshot data has rank zero; nothing to train")
    scaler = ParamScaler.from_samples(PARAM_NAMES, train_set.param_matrix())
    x_tr = np.array([scaler.scale(mu) for mu in train_set.param_matrix()])
    _, t_tr = project_columns(basis, train_set.values)
    x_va = np.array([scaler.scale(mu) for mu in val_set.param_matrix()])
    _, t_va = project_columns(basis, val_set.values)
    layout = cfg.layout
    if layout.output_dim != basis.n_modes:
        from .neural import MlpLayout

        layout = MlpLayout(
            input_dim=layout.input_dim,
            hidden_layers=layout.hidden_layers,
            hidden_width=layout.hidden_width,
            output_dim=basis.n_modes,
        )
    mlp0 = init_mlp(layout, cfg.training.seed)
    _, report = train_mlp(mlp0, (x_tr, t_tr.T), (x_va, t_va.T), cfg.training)
    report.write_csv(args.out)
    print(
        f"wrote {args.out} (best epoch {report.best_epoch}, "
        f"val mse {report.best_val_mse:.3e})"
    )
    return 0


def _build_bundle(cfg: Config, store_dir: Path, workers: int):
    _ensure_stores(cfg, store_dir, workers)
    train_set = _read_store(cfg, store_dir, "train")
    val_set = _read_store(cfg, store_dir, "val")
    return build_rom(
        train_set,
        val_set,
        cfg.profile(),
        cfg.material,
        cfg.discretization,
        cfg.sampling,
        n_modes=cfg.rom.n_modes,
        tol_rank=cfg.rom.tol_rank,
        layout=cfg.layout,
        train_config=cfg.training,
        t_inlet=cfg.t_inlet,
    )


def cmd_build(args) -> int:
    cfg = _config_from_args(args)
    out = Path(args.out)
    store_dir = Path(args.store) if args.store else out.parent / "snapshots"
    bundle = _build_bundle(cfg, store_dir, args.workers)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_bundle(bundle, out)
    training = bundle.meta.get("training", {})
    print(f"wrote {out} (modes={bundle.n_modes}, training={training})")
    return 0


def cmd_evaluate(args) -> int:
    cfg = _config_from_args(args)
    bundle = load_bundle(_model_path(args))
    test_params = sample_params(bundle.plan, bundle.t_inlet)[2]
    oracle = None
    if args.store:
        test_path = _store_paths(Path(args.store))["test"]
        if test_path.exists():
            test_set = _read_store(cfg, Path(args.store), "test")
            oracle = store_oracle(test_set)
    if oracle is None:
        oracle = live_fom_oracle(cfg.profile(), cfg.material, cfg.discretization)
    report = evaluate(bundle, test_params, oracle)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    report.write_json(out)
    report.write_csv(out.with_suffix(".csv"))
    print(
        f"wrote {out}: mean error {report.mean_error:.3e}, "
        f"max {report.max_error:.3e}, floor {report.mean_floor:.3e}"
    )
    return 0


def cmd_predict(args) -> int:
    bundle = load_bundle(_model_path(args))
    result = predict(bundle, args.t_amb, args.htc)
    if result.extrapolated:
        print(
            f"warning: parameters ({args.t_amb}, {args.htc}) lie outside the "
            f"training box {bundle.plan.box}; extrapolating",
            file=sys.stderr,
        )
    print(f"t_ambient_K={result.t_ambient!r}")
    print(f"htc_W_m2K={result.htc!r}")
    for key in (
        "min",
        "max",
        "mean",
        "outlet_mean",
        "outlet_large_core_mean",
        "outlet_small_core_mean",
        "outlet_surface_std",
    ):
        print(f"{key}_K={result.summary[key]!r}")
    print(f"outlet_spread_ratio={result.summary['outlet_spread_ratio']!r}")
    print(f"latency_ms={result.latency_s * 1e3:.3f}")
    if args.slices and args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        stations = [int(s) for s in args.slices.split(",")]
        grid = bundle.grid
        cells = np.nonzero(grid.interior_map >= 0)[0]
        i_idx = cells % grid.nx
        j_idx = cells // grid.nx
        for s in stations:
            if not 0 <= s < grid.n_stations:
                raise ConfigurationError(f"station {s} out of range [0, {grid.n_stations})")
            values = result.field_2d[s]
            path = out_dir / f"slice_{s:03d}.csv"
            with open(path, "w", encoding="utf-8") as fh:
                fh.write("i,j,x,y,temperature_K\n")
                for i, j, v in zip(i_idx, j_idx, values):
                    x = grid.x0 + grid.dx * i
                    y = grid.y0 + grid.dx * j
                    fh.write(f"{i},{j},{x!r},{y!r},{v!r}\n")
            print(f"wrote {path}")
    return 0


def cmd_serve(args) -> int:
    bundle = load_bundle(_model_path(args))
    host, _, port = args.bind.rpartition(":")
    host = host or "127.0.0.1"
    server = make_server(bundle, host, int(port), ui_dir=args.ui, verbose=args.verbose)
    addr = server.server_address
    print(f"serving on http://{addr[0]}:{addr[1]} (model: {_model_path(args)})", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def cmd_report(args) -> int:
    cfg = _config_from_args(args)
    grid = rasterize(cfg.profile(), cfg.discretization.dx)
    mid_ta = 0.5 * sum(cfg.sampling.t_ambient_range)
    mid_htc = 0.5 * sum(cfg.sampling.htc_range)
    from .fom import ProcessParams

    numbers = biot_fourier_report(
        cfg.material,
        ProcessParams(t_ambient=mid_ta, htc=mid_htc, t_inlet=cfg.t_inlet),
        cfg.profile(),
        cfg.discretization,
    )
    payload = {
        "config": cfg.name,
        "grid": grid.summary(),
        "dimensionless": numbers,
        "hashes": {
            "geometry": cfg.geometry_hash(),
            "discretization": cfg.discretization_hash(),
        },
    }
    text = json.dumps(payload, indent=1, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def cmd_write_config(args) -> int:
    save_config(preset(args.preset), args.out)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="calibrom",
        description="Reduced-order temperature prediction for extruded profiles",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p):
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--preset", default="desk", help="named preset (desk, table2)")

    p = sub.add_parser("generate-snapshots", help="solve the FOM over all splits")
    add_config(p)
    p.add_argument("--out", required=True, help="store directory")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_generate_snapshots)

    p = sub.add_parser("build-rb", help="build the reduced basis, write the spectrum CSV")
    add_config(p)
    p.add_argument("--store", required=True, help="snapshot store directory")
    p.add_argument("--out", required=True, help="spectrum CSV path")
    p.set_defaults(func=cmd_build_rb)

    p = sub.add_parser("train", help="train the coefficient network, write the report CSV")
    add_config(p)
    p.add_argument("--store", required=True)
    p.add_argument("--out", required=True, help="training report CSV path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("build", help="end-to-end offline stage, write the model bundle")
    add_config(p)
    p.add_argument("--store", help="snapshot store directory (generated when missing)")
    p.add_argument("--out", required=True, help="bundle path (.romb)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("evaluate", help="error report against the full-order model")
    add_config(p)
    p.add_argument("--model")
    p.add_argument("--store", help="reuse stored test snapshots when hashes match")
    p.add_argument("--out", required=True, help="error report JSON path")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="print the prediction summary for one parameter set")
    p.add_argument("--model")
    p.add_argument("--t-amb", type=float, required=True, dest="t_amb")
    p.add_argument("--htc", type=float, required=True)
    p.add_argument("--slices", help="comma-separated station indices to export as CSV")
    p.add_argument("--out-dir", dest="out_dir", help="directory for slice CSV files")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--model")
    p.add_argument("--bind", default="127.0.0.1:8080")
    p.add_argument("--ui", help="directory with operator UI static assets")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("report", help="grid summary and dimensionless regime numbers")
    add_config(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("write-config", help="write a preset configuration to JSON")
    p.add_argument("--preset", default="desk")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_write_config)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except CalibromError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
