"""Shared fixtures: Table-1 geometry, a coarse grid, and a small but real
end-to-end bundle used by the rom/cli/server tests."""

import numpy as np
import pytest

from calibrom.config import Config, GeometryConfig, RomConfig, save_config
from calibrom.fom import Discretization, MaterialParams, SnapshotSet, generate_snapshot_matrix
from calibrom.geometry import ProfileGeometry, rasterize
from calibrom.neural import MlpLayout, TrainConfig
from calibrom.rom import SamplingPlan, build_rom, sample_params, save_bundle


@pytest.fixture(scope="session")
def table1_geometry():
    return ProfileGeometry(r1=0.006, r2=0.0033, h=0.01, w=0.003, l=1.0)


@pytest.fixture(scope="session")
def coarse_grid(table1_geometry):
    return rasterize(table1_geometry, 1.0e-3)


@pytest.fixture(scope="session")
def tiny_config():
    return Config(
        name="tiny",
        geometry=GeometryConfig(),
        material=MaterialParams(rho=900.0, cp=2000.0, k=0.2, u=0.01),
        t_inlet=473.0,
        discretization=Discretization(dx=1.0e-3, nz=11, z_stride=5, cg_tol=1e-10, cg_max_iter=4000),
        sampling=SamplingPlan(n_train=12, n_val=6, n_test=6),
        rom=RomConfig(n_modes=4),
        layout=MlpLayout(input_dim=2, hidden_layers=2, hidden_width=16, output_dim=4),
        training=TrainConfig(max_epochs=4000, patience=800, seed=11),
    )


@pytest.fixture(scope="session")
def tiny_config_path(tiny_config, tmp_path_factory):
    path = tmp_path_factory.mktemp("config") / "tiny.json"
    save_config(tiny_config, path)
    return path


def _snapshot_set(cfg, grid, params, split):
    values = generate_snapshot_matrix(grid, cfg.material, cfg.discretization, params)
    stations_z = np.array(cfg.discretization.stored_stations(), dtype=float) * (
        cfg.geometry.l / (cfg.discretization.nz - 1)
    )
    return SnapshotSet(
        values=values,
        params=params,
        geometry_hash=cfg.geometry_hash(),
        discretization_hash=cfg.discretization_hash(),
        stations_z=stations_z,
        meta={"split": split},
    )


@pytest.fixture(scope="session")
def tiny_sets(tiny_config):
    cfg = tiny_config
    grid = rasterize(cfg.profile(), cfg.discretization.dx)
    train_p, val_p, test_p = sample_params(cfg.sampling, cfg.t_inlet)
    return {
        "train": _snapshot_set(cfg, grid, train_p, "train"),
        "val": _snapshot_set(cfg, grid, val_p, "val"),
        "test": _snapshot_set(cfg, grid, test_p, "test"),
    }


@pytest.fixture(scope="session")
def tiny_bundle(tiny_config, tiny_sets):
    cfg = tiny_config
    return build_rom(
        tiny_sets["train"],
        tiny_sets["val"],
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


@pytest.fixture(scope="session")
def tiny_bundle_path(tiny_bundle, tmp_path_factory):
    path = tmp_path_factory.mktemp("bundle") / "tiny.romb"
    save_bundle(tiny_bundle, path)
    return path
