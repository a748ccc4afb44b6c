"""Offline/online orchestration: sampling, basis + network assembly into a
deployable bundle, fast online prediction, and error evaluation against the
full-order solver.

The offline product is a single-file binary bundle (magic "ROMB") with a
sectioned tag-length-value layout: grid summary, reduced basis, parameter
scaler, network weights, and a JSON metadata blob.  Loading a saved bundle
reproduces predictions bit for bit.  The online path never touches the
snapshot store or the full-order solver.
"""

from __future__ import annotations

import datetime as _dt
import json
import math
import struct
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BundleFormatError, ConfigurationError
from .fom import (
    Discretization,
    MaterialParams,
    ProcessParams,
    SnapshotSet,
    solve_fom,
)
from .geometry import ProfileGeometry, RegionMasks, VoxelGrid, rasterize, region_masks
from .neural import Mlp, MlpLayout, TrainConfig, forward, init_mlp, train
from .reduction import (
    ParamScaler,
    ReducedBasis,
    center,
    compute_basis,
    eigendecompose_spsd,
    gram,
    project_columns,
    projection_error_spectrum,
)
from .rng import Xoshiro256pp

BUNDLE_MAGIC = b"ROMB"
BUNDLE_VERSION = 1

PARAM_NAMES = ("t_ambient", "htc")


@dataclass(frozen=True)
class SamplingPlan:
    """Parameter box, split sizes and per-split seeds."""

    t_ambient_range: tuple = (288.0, 298.0)
    htc_range: tuple = (218.0, 320.0)
    n_train: int = 100
    n_val: int = 100
    n_test: int = 100
    seeds: tuple = (42, 43, 44)

    def __post_init__(self):
        for lo, hi in (self.t_ambient_range, self.htc_range):
            if not lo < hi:
                raise ConfigurationError("parameter box must have min < max")
        if min(self.n_train, self.n_val, self.n_test) < 1:
            raise ConfigurationError("split sizes must be at least 1")
        if len(self.seeds) != 3:
            raise ConfigurationError("need one seed per split")

    @property
    def box(self) -> dict:
        return {"t_ambient": list(self.t_ambient_range), "htc": list(self.htc_range)}

    def midpoint(self) -> tuple[float, float]:
        return (
            0.5 * (self.t_ambient_range[0] + self.t_ambient_range[1]),
            0.5 * (self.htc_range[0] + self.htc_range[1]),
        )

    def contains(self, t_ambient: float, htc: float) -> bool:
        return (
            self.t_ambient_range[0] <= t_ambient <= self.t_ambient_range[1]
            and self.htc_range[0] <= htc <= self.htc_range[1]
        )


def _draw_split(plan: SamplingPlan, seed: int, count: int, t_inlet: float) -> list[ProcessParams]:
    rng = Xoshiro256pp(seed)
    out = []
    for _ in range(count):
        ta = rng.uniform(*plan.t_ambient_range)
        hc = rng.uniform(*plan.htc_range)
        out.append(ProcessParams(t_ambient=ta, htc=hc, t_inlet=t_inlet))
    return out


def sample_params(plan: SamplingPlan, t_inlet: float = 473.0):
    """Uniform independent draws per split, reproducible per seed.  Per
    sample the order is t_ambient then htc."""
    train = _draw_split(plan, plan.seeds[0], plan.n_train, t_inlet)
    val = _draw_split(plan, plan.seeds[1], plan.n_val, t_inlet)
    test = _draw_split(plan, plan.seeds[2], plan.n_test, t_inlet)
    return train, val, test


@dataclass
class BundleGrid:
    """The grid facts a deployed bundle needs: compact indexing for field
    rendering plus the region index sets for the summary metrics."""

    nx: int
    ny: int
    dx: float
    x0: float
    y0: float
    length: float
    n_interior: int
    n_boundary_faces: int
    stations_z: np.ndarray
    interior_map: np.ndarray
    large_core: np.ndarray
    small_core: np.ndarray
    surface_ring: np.ndarray

    @property
    def n_stations(self) -> int:
        return int(self.stations_z.shape[0])

    @property
    def n_dof(self) -> int:
        return self.n_interior * self.n_stations

    def interior_mask(self) -> np.ndarray:
        """Row-major 0/1 mask of length nx*ny."""
        return (self.interior_map >= 0).astype(np.uint8)

    @classmethod
    def from_grid(cls, grid: VoxelGrid, masks: RegionMasks, stations_z: np.ndarray) -> "BundleGrid":
        return cls(
            nx=grid.nx,
            ny=grid.ny,
            dx=grid.dx,
            x0=grid.x0,
            y0=grid.y0,
            length=grid.length,
            n_interior=grid.n_interior,
            n_boundary_faces=grid.n_boundary_faces,
            stations_z=np.asarray(stations_z, dtype=float),
            interior_map=grid.interior_map.copy(),
            large_core=masks.large_cylinder_core.copy(),
            small_core=masks.small_cylinder_core.copy(),
            surface_ring=masks.surface_ring.copy(),
        )

    def summary(self) -> dict:
        return {
            "nx": self.nx,
            "ny": self.ny,
            "dx": self.dx,
            "n_interior": self.n_interior,
            "n_boundary_faces": self.n_boundary_faces,
            "n_stations": self.n_stations,
            "stations_z": [float(z) for z in self.stations_z],
            "length": self.length,
        }


@dataclass
class RomBundle:
    basis: ReducedBasis
    mlp: Mlp | None
    material: MaterialParams
    t_inlet: float
    geometry: ProfileGeometry
    grid: BundleGrid
    plan: SamplingPlan
    hashes: dict
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.basis.n_dof != self.grid.n_dof:
            raise ConfigurationError("basis dof does not match grid summary")
        if self.mlp is not None:
            if self.mlp.layout.output_dim != self.basis.n_modes:
                raise ConfigurationError("network output_dim must equal basis mode count")
            if self.mlp.layout.input_dim != len(PARAM_NAMES):
                raise ConfigurationError("network input_dim must match parameter dimension")

    @property
    def n_modes(self) -> int:
        return self.basis.n_modes


@dataclass
class PredictionResult:
    t_ambient: float
    htc: float
    field: np.ndarray
    stations_z: np.ndarray
    n_interior: int
    summary: dict
    surface_means: np.ndarray
    extrapolated: bool
    latency_s: float

    @property
    def field_2d(self) -> np.ndarray:
        return self.field.reshape(len(self.stations_z), self.n_interior)


def _summarize(field_2d: np.ndarray, grid: BundleGrid, t_ambient: float) -> dict:
    outlet = field_2d[-1]
    out_max = float(outlet.max())
    surface = outlet[grid.surface_ring]
    sstd = float(surface.std())
    denom = out_max - t_ambient
    ratio = sstd / denom if denom > 1e-12 else 0.0
    return {
        "min": float(field_2d.min()),
        "max": float(field_2d.max()),
        "mean": float(field_2d.mean()),
        "outlet_mean": float(outlet.mean()),
        "outlet_max": out_max,
        "outlet_large_core_mean": float(outlet[grid.large_core].mean()),
        "outlet_small_core_mean": float(outlet[grid.small_core].mean()),
        "outlet_surface_std": sstd,
        "outlet_spread_ratio": ratio,
    }


def predict(bundle: RomBundle, t_ambient: float, htc: float) -> PredictionResult:
    """Online evaluation: scale parameters, run the network, de-standardize,
    reconstruct the field, and summarize.  Read-only and FOM-free."""
    if not (math.isfinite(t_ambient) and math.isfinite(htc)):
        raise ValueError("parameters must be finite")
    start = time.perf_counter()
    basis = bundle.basis
    if bundle.mlp is not None:
        x = basis.param_scaler.scale((t_ambient, htc))
        standardized = forward(bundle.mlp, x)
        raw = standardized * basis.singular_values
        fld = basis.modes @ raw
        fld += basis.mean_field
    else:
        fld = basis.mean_field.copy()
    grid = bundle.grid
    field_2d = fld.reshape(grid.n_stations, grid.n_interior)
    summary = _summarize(field_2d, grid, t_ambient)
    surface_means = field_2d[:, grid.surface_ring].mean(axis=1)
    latency = time.perf_counter() - start
    return PredictionResult(
        t_ambient=float(t_ambient),
        htc=float(htc),
        field=fld,
        stations_z=grid.stations_z,
        n_interior=grid.n_interior,
        summary=summary,
        surface_means=surface_means,
        extrapolated=not bundle.plan.contains(t_ambient, htc),
        latency_s=latency,
    )


# ---------------------------------------------------------------------------
# Offline stage


def build_rom(
    train_set: SnapshotSet,
    val_set: SnapshotSet,
    geometry: ProfileGeometry,
    material: MaterialParams,
    disc: Discretization,
    plan: SamplingPlan,
    n_modes: int = 30,
    tol_rank: float = 1e-12,
    layout: MlpLayout | None = None,
    train_config: TrainConfig | None = None,
    t_inlet: float = 473.0,
) -> RomBundle:
    """center -> gram -> eigendecompose -> basis -> project -> train,
    assembled into a deployable bundle."""
    geometry_hash = geometry.grid_hash(disc.dx)
    disc_hash = disc.content_hash(material, t_inlet)
    for name, sset in (("train", train_set), ("validation", val_set)):
        if sset.geometry_hash and sset.geometry_hash != geometry_hash:
            raise ConfigurationError(f"{name} snapshots were generated for another geometry")
        if sset.discretization_hash and sset.discretization_hash != disc_hash:
            raise ConfigurationError(f"{name} snapshots were generated for another discretization")

    grid = rasterize(geometry, disc.dx)
    masks = region_masks(grid, geometry)
    if grid.n_interior * disc.n_stations_stored != train_set.n_dof:
        raise ConfigurationError("snapshot length does not match grid and stations")

    mean, sc = center(train_set.values)
    vals, vecs = eigendecompose_spsd(gram(sc))
    basis = compute_basis(sc, vals, vecs, n_modes, tol_rank, mean_field=mean)
    scaler = ParamScaler.from_samples(PARAM_NAMES, train_set.param_matrix())
    basis = basis.with_scaler(scaler)

    notes = []
    if basis.truncation_note:
        notes.append(basis.truncation_note)

    mlp = None
    training_summary: dict = {"trained": False}
    if basis.n_modes > 0:
        layout = layout or MlpLayout(output_dim=basis.n_modes)
        if layout.output_dim != basis.n_modes:
            layout = MlpLayout(
                input_dim=layout.input_dim,
                hidden_layers=layout.hidden_layers,
                hidden_width=layout.hidden_width,
                output_dim=basis.n_modes,
            )
        train_config = train_config or TrainConfig()
        x_tr = np.array([scaler.scale(mu) for mu in train_set.param_matrix()])
        _, t_tr = project_columns(basis, train_set.values)
        x_va = np.array([scaler.scale(mu) for mu in val_set.param_matrix()])
        _, t_va = project_columns(basis, val_set.values)
        mlp0 = init_mlp(layout, train_config.seed)
        mlp, report = train(mlp0, (x_tr, t_tr.T), (x_va, t_va.T), train_config)
        training_summary = {
            "trained": True,
            "epochs_run": len(report.train_mse),
            "best_epoch": report.best_epoch,
            "best_val_mse": report.best_val_mse,
            "final_train_mse": report.train_mse[-1],
        }

    stations_z = np.array(disc.stored_stations(), dtype=float) * (
        geometry.l / (disc.nz - 1)
    )
    bundle = RomBundle(
        basis=basis,
        mlp=mlp,
        material=material,
        t_inlet=t_inlet,
        geometry=geometry,
        grid=BundleGrid.from_grid(grid, masks, stations_z),
        plan=plan,
        hashes={"geometry": geometry_hash, "discretization": disc_hash},
        meta={
            "format_version": BUNDLE_VERSION,
            "created": _dt.datetime.now(_dt.timezone.utc).isoformat(),
            "param_names": list(PARAM_NAMES),
            "notes": notes,
            "training": training_summary,
            "discretization": {
                "dx": disc.dx,
                "nz": disc.nz,
                "z_stride": disc.z_stride,
                "cg_tol": disc.cg_tol,
                "cg_max_iter": disc.cg_max_iter,
            },
        },
    )

    # record the per-sample rom error on the training set for later sanity checks
    errors = []
    for j, p in enumerate(train_set.params):
        res = predict(bundle, p.t_ambient, p.htc)
        truth = train_set.values[:, j]
        errors.append(float(np.linalg.norm(res.field - truth) / np.linalg.norm(truth)))
    bundle.meta["train_errors"] = errors
    return bundle


# ---------------------------------------------------------------------------
# Evaluation against the full-order model


def live_fom_oracle(geometry: ProfileGeometry, material: MaterialParams, disc: Discretization):
    """Oracle that solves the FOM on demand."""
    grid = rasterize(geometry, disc.dx)

    def solve(index: int, process: ProcessParams) -> np.ndarray:
        return solve_fom(grid, material, process, disc).values

    return solve


def store_oracle(snapshots: SnapshotSet):
    """Oracle backed by pre-solved snapshots; parameters must match the
    stored column exactly (same deterministic solver wrote them)."""

    def solve(index: int, process: ProcessParams) -> np.ndarray:
        stored = snapshots.params[index]
        if (stored.t_ambient, stored.htc, stored.t_inlet) != (
            process.t_ambient,
            process.htc,
            process.t_inlet,
        ):
            raise ConfigurationError("stored snapshot parameters do not match request")
        return snapshots.values[:, index].copy()

    return solve


@dataclass
class ErrorReport:
    params: list
    errors: list
    floors: list
    mean_error: float
    max_error: float
    mean_floor: float
    qualitative: dict
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "params": [{"t_ambient": p.t_ambient, "htc": p.htc} for p in self.params],
            "errors": self.errors,
            "floors": self.floors,
            "mean_error": self.mean_error,
            "max_error": self.max_error,
            "mean_floor": self.mean_floor,
            "qualitative": self.qualitative,
            "failures": self.failures,
        }

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("t_ambient,htc,rel_l2_error,projection_floor\n")
            for p, e, f in zip(self.params, self.errors, self.floors):
                fh.write(f"{p.t_ambient!r},{p.htc!r},{e!r},{f!r}\n")


def evaluate(
    bundle: RomBundle,
    test_params: list[ProcessParams],
    oracle,
    predictor: str = "mlp",
) -> ErrorReport:
    """Relative L2 errors of the rom against the full-order oracle, plus the
    projection floor (best achievable in the subspace) and the qualitative
    temperature-distribution checks at the mid-box operating point.

    predictor="projection" replaces the network with exact projection; the
    per-sample error then equals the floor by construction.
    """
    basis = bundle.basis
    errors = []
    floors = []
    used_params = []
    failures = []
    for i, p in enumerate(test_params):
        try:
            truth = oracle(i, p)
        except Exception as exc:  # record, keep going
            failures.append({"index": i, "error": str(exc)})
            continue
        truth_norm = float(np.linalg.norm(truth))
        centered = truth - basis.mean_field
        proj = basis.mean_field + basis.modes @ (basis.modes.T @ centered)
        floor = float(np.linalg.norm(truth - proj) / truth_norm)
        if predictor == "projection":
            approx = proj
        else:
            approx = predict(bundle, p.t_ambient, p.htc).field
        errors.append(float(np.linalg.norm(approx - truth) / truth_norm))
        floors.append(floor)
        used_params.append(p)

    mid_ta, mid_htc = bundle.plan.midpoint()
    mid = predict(bundle, mid_ta, mid_htc)
    qualitative = {
        "mid_box_param": {"t_ambient": mid_ta, "htc": mid_htc},
        "large_core_hotter_than_small": bool(
            mid.summary["outlet_large_core_mean"] > mid.summary["outlet_small_core_mean"]
        ),
        "surface_cooled_uniformly": bool(mid.summary["outlet_spread_ratio"] < 0.1),
        "outlet_spread_ratio": mid.summary["outlet_spread_ratio"],
    }
    return ErrorReport(
        params=used_params,
        errors=errors,
        floors=floors,
        mean_error=float(np.mean(errors)) if errors else math.nan,
        max_error=float(np.max(errors)) if errors else math.nan,
        mean_floor=float(np.mean(floors)) if floors else math.nan,
        qualitative=qualitative,
        failures=failures,
    )


def energy_spectrum_csv(basis: ReducedBasis, path) -> None:
    """CSV of (mode index, eigenvalue, cumulative energy fraction)."""
    lam = basis.energy_spectrum
    total = float(lam.sum())
    cum = np.cumsum(lam) / total if total > 0 else np.zeros_like(lam)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("mode,eigenvalue,cumulative_energy_fraction\n")
        for i, (v, c) in enumerate(zip(lam, cum), start=1):
            fh.write(f"{i},{float(v)!r},{float(c)!r}\n")


# ---------------------------------------------------------------------------
# Bundle persistence (TLV container)

_SEC = struct.Struct("<4sQ")


def _sections(bundle: RomBundle) -> list[tuple[bytes, bytes]]:
    g = bundle.grid
    grid_payload = b"".join(
        [
            struct.pack("<II", g.nx, g.ny),
            struct.pack("<dddd", g.dx, g.x0, g.y0, g.length),
            struct.pack("<QQI", g.n_interior, g.n_boundary_faces, g.n_stations),
            g.stations_z.astype("<f8").tobytes(),
            g.interior_map.astype("<i8").tobytes(),
            struct.pack("<Q", g.large_core.size),
            g.large_core.astype("<i8").tobytes(),
            struct.pack("<Q", g.small_core.size),
            g.small_core.astype("<i8").tobytes(),
            struct.pack("<Q", g.surface_ring.size),
            g.surface_ring.astype("<i8").tobytes(),
        ]
    )
    b = bundle.basis
    basis_payload = b"".join(
        [
            struct.pack("<QQQ", b.n_dof, b.n_modes, b.energy_spectrum.size),
            b.mean_field.astype("<f8").tobytes(),
            b.singular_values.astype("<f8").tobytes(),
            # C order: the loaded array then has the same memory layout as a
            # freshly built basis, which keeps predictions bit-identical
            np.ascontiguousarray(b.modes.astype("<f8")).tobytes(order="C"),
            b.energy_spectrum.astype("<f8").tobytes(),
        ]
    )
    s = b.param_scaler
    scal_payload = b"".join(
        [
            struct.pack("<Q", len(s.names)),
            s.mins.astype("<f8").tobytes(),
            s.maxs.astype("<f8").tobytes(),
        ]
    )
    sections = [(b"GRID", grid_payload), (b"BASI", basis_payload), (b"SCAL", scal_payload)]
    if bundle.mlp is not None:
        m = bundle.mlp
        dims = m.layout.dims
        net = [struct.pack("<IQ", len(m.weights), m.rng_seed & (2**64 - 1))]
        net.append(struct.pack(f"<{len(dims)}I", *dims))
        for w, bias in zip(m.weights, m.biases):
            net.append(np.ascontiguousarray(w.astype("<f8")).tobytes())
            net.append(bias.astype("<f8").tobytes())
        sections.append((b"NNET", b"".join(net)))
    meta = {
        "meta": bundle.meta,
        "material": {
            "rho": bundle.material.rho,
            "cp": bundle.material.cp,
            "k": bundle.material.k,
            "u": bundle.material.u,
        },
        "geometry": {
            "r1": bundle.geometry.r1,
            "r2": bundle.geometry.r2,
            "h": bundle.geometry.h,
            "w": bundle.geometry.w,
            "l": bundle.geometry.l,
        },
        "t_inlet": bundle.t_inlet,
        "plan": {
            "t_ambient_range": list(bundle.plan.t_ambient_range),
            "htc_range": list(bundle.plan.htc_range),
            "n_train": bundle.plan.n_train,
            "n_val": bundle.plan.n_val,
            "n_test": bundle.plan.n_test,
            "seeds": list(bundle.plan.seeds),
        },
        "hashes": bundle.hashes,
        "scaler_names": list(bundle.basis.param_scaler.names),
        "mlp_layout": None
        if bundle.mlp is None
        else {
            "input_dim": bundle.mlp.layout.input_dim,
            "hidden_layers": bundle.mlp.layout.hidden_layers,
            "hidden_width": bundle.mlp.layout.hidden_width,
            "output_dim": bundle.mlp.layout.output_dim,
        },
        "basis_truncation_note": bundle.basis.truncation_note,
    }
    sections.append((b"META", json.dumps(meta, sort_keys=True).encode("utf-8")))
    return sections


def save_bundle(bundle: RomBundle, path) -> None:
    with open(path, "wb") as fh:
        fh.write(BUNDLE_MAGIC)
        fh.write(struct.pack("<I", BUNDLE_VERSION))
        for tag, payload in _sections(bundle):
            fh.write(_SEC.pack(tag, len(payload)))
            fh.write(payload)


class _Reader:
    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.buf):
            raise BundleFormatError("bundle section truncated")
        out = self.buf[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        s = struct.Struct(fmt)
        return s.unpack(self.take(s.size))

    def array(self, dtype: str, count: int, shape=None, order="C") -> np.ndarray:
        itemsize = np.dtype(dtype).itemsize
        arr = np.frombuffer(self.take(itemsize * count), dtype=dtype)
        if shape is not None:
            arr = arr.reshape(shape, order=order)
        return np.array(arr)  # own the memory, writable


def load_bundle(path) -> RomBundle:
    data = Path(path).read_bytes()
    if len(data) < 8 or data[:4] != BUNDLE_MAGIC:
        raise BundleFormatError("not a rom bundle (bad magic)")
    (version,) = struct.unpack("<I", data[4:8])
    if version != BUNDLE_VERSION:
        raise BundleFormatError(f"unsupported bundle version {version}")
    pos = 8
    sections = {}
    while pos < len(data):
        if pos + _SEC.size > len(data):
            raise BundleFormatError("bundle section header truncated")
        tag, length = _SEC.unpack(data[pos : pos + _SEC.size])
        pos += _SEC.size
        if pos + length > len(data):
            raise BundleFormatError("bundle section truncated")
        sections[tag] = data[pos : pos + length]
        pos += length
    for required in (b"GRID", b"BASI", b"SCAL", b"META"):
        if required not in sections:
            raise BundleFormatError(f"bundle is missing the {required.decode()} section")

    meta_all = json.loads(sections[b"META"].decode("utf-8"))

    r = _Reader(sections[b"GRID"])
    nx, ny = r.unpack("<II")
    dx, x0, y0, length = r.unpack("<dddd")
    n_interior, n_faces, n_stations = r.unpack("<QQI")
    stations_z = r.array("<f8", n_stations)
    interior_map = r.array("<i8", nx * ny)
    (n_large,) = r.unpack("<Q")
    large = r.array("<i8", n_large)
    (n_small,) = r.unpack("<Q")
    small = r.array("<i8", n_small)
    (n_surf,) = r.unpack("<Q")
    surf = r.array("<i8", n_surf)
    grid = BundleGrid(
        nx=nx,
        ny=ny,
        dx=dx,
        x0=x0,
        y0=y0,
        length=length,
        n_interior=int(n_interior),
        n_boundary_faces=int(n_faces),
        stations_z=stations_z,
        interior_map=interior_map,
        large_core=large,
        small_core=small,
        surface_ring=surf,
    )

    r = _Reader(sections[b"BASI"])
    n_dof, n_modes, n_spec = r.unpack("<QQQ")
    mean_field = r.array("<f8", n_dof)
    singular = r.array("<f8", n_modes)
    modes = r.array("<f8", n_dof * n_modes, shape=(n_dof, n_modes), order="C")
    spectrum = r.array("<f8", n_spec)

    r = _Reader(sections[b"SCAL"])
    (n_par,) = r.unpack("<Q")
    mins = r.array("<f8", n_par)
    maxs = r.array("<f8", n_par)
    scaler = ParamScaler(tuple(meta_all["scaler_names"]), mins, maxs)

    basis = ReducedBasis(
        mean_field=mean_field,
        modes=modes,
        singular_values=singular,
        energy_spectrum=spectrum,
        param_scaler=scaler,
        truncation_note=meta_all.get("basis_truncation_note"),
    )

    mlp = None
    if b"NNET" in sections:
        r = _Reader(sections[b"NNET"])
        n_layers, seed = r.unpack("<IQ")
        dims = list(r.unpack(f"<{n_layers + 1}I"))
        lay_meta = meta_all["mlp_layout"]
        layout = MlpLayout(
            input_dim=lay_meta["input_dim"],
            hidden_layers=lay_meta["hidden_layers"],
            hidden_width=lay_meta["hidden_width"],
            output_dim=lay_meta["output_dim"],
        )
        if layout.dims != dims:
            raise BundleFormatError("network dims do not match stored layout")
        weights = []
        biases = []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            weights.append(r.array("<f8", fan_out * fan_in, shape=(fan_out, fan_in)))
            biases.append(r.array("<f8", fan_out))
        mlp = Mlp(layout=layout, weights=weights, biases=biases, rng_seed=int(seed))

    mat = meta_all["material"]
    geo = meta_all["geometry"]
    plan_meta = meta_all["plan"]
    return RomBundle(
        basis=basis,
        mlp=mlp,
        material=MaterialParams(rho=mat["rho"], cp=mat["cp"], k=mat["k"], u=mat["u"]),
        t_inlet=meta_all["t_inlet"],
        geometry=ProfileGeometry(
            r1=geo["r1"], r2=geo["r2"], h=geo["h"], w=geo["w"], l=geo["l"]
        ),
        grid=grid,
        plan=SamplingPlan(
            t_ambient_range=tuple(plan_meta["t_ambient_range"]),
            htc_range=tuple(plan_meta["htc_range"]),
            n_train=plan_meta["n_train"],
            n_val=plan_meta["n_val"],
            n_test=plan_meta["n_test"],
            seeds=tuple(plan_meta["seeds"]),
        ),
        hashes=meta_all["hashes"],
        meta=meta_all["meta"],
    )
