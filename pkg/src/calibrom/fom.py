"""Full-order model: steady advection-diffusion cooling of the extruded
profile, solved by implicit marching of the 2D cross-section along the
extrusion axis.

Per axial station the finite-volume balance on an interior cell c reads

    a (T_c - T_c^old) = k * sum_nb (T_nb - T_c) - htc dx * nb_faces(c) * (T_c - T_amb)

with a = rho cp u dx^2 / dz.  The left side is the implicit (backward Euler
in z) advection step, the first right-hand term the 5-point Laplacian in
flux form, the second the Robin surface cooling with the cell-center value
standing in for the surface temperature (ghost-free flux form).  The
resulting operator is symmetric positive definite and each station is
solved by conjugate gradients warm-started from the previous station.

Axial conduction is neglected; the Peclet number reported by
``biot_fourier_report`` documents the regime where that is justified.
"""

from __future__ import annotations

import datetime as _dt
import json
import struct
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BundleFormatError, ConfigurationError, ConvergenceError
from .geometry import ProfileGeometry, VoxelGrid
from .hashutil import stable_hash

SNAP_MAGIC = b"SNAP"
SNAP_VERSION = 1
_ELEM_F8_LE = 1  # 64-bit IEEE-754 little-endian
_HEADER = struct.Struct("<4sII QQ")


@dataclass(frozen=True)
class MaterialParams:
    """Material and process constants: density, specific heat, conductivity
    and the axial advection velocity."""

    rho: float = 900.0
    cp: float = 2000.0
    k: float = 0.2
    u: float = 0.01

    def __post_init__(self):
        if not all(v > 0 for v in (self.rho, self.cp, self.k, self.u)):
            raise ConfigurationError("material parameters must be positive")


@dataclass(frozen=True)
class ProcessParams:
    """The varied operating point: ambient temperature and the magnitude of
    the surface heat-transfer coefficient, plus the inlet temperature."""

    t_ambient: float
    htc: float
    t_inlet: float = 473.0

    def __post_init__(self):
        if self.htc < 0:
            raise ConfigurationError("htc magnitude must be non-negative")
        if self.t_inlet < self.t_ambient:
            warnings.warn(
                "t_inlet below t_ambient: this is a heating run, not cooling",
                RuntimeWarning,
                stacklevel=2,
            )


@dataclass(frozen=True)
class Discretization:
    dx: float = 0.25e-3
    nz: int = 101
    z_stride: int = 5
    cg_tol: float = 1e-10
    cg_max_iter: int = 5000

    def __post_init__(self):
        if self.dx <= 0:
            raise ConfigurationError("dx must be positive")
        if self.nz < 2:
            raise ConfigurationError("nz must be at least 2")
        if self.z_stride < 1 or (self.nz - 1) % self.z_stride != 0:
            raise ConfigurationError("(nz - 1) must be divisible by z_stride")
        if not (0 < self.cg_tol <= 1e-4):
            raise ConfigurationError("cg_tol must be in (0, 1e-4]")
        if self.cg_max_iter < 1:
            raise ConfigurationError("cg_max_iter must be positive")

    @property
    def n_stations_stored(self) -> int:
        return (self.nz - 1) // self.z_stride + 1

    def stored_stations(self) -> list[int]:
        return list(range(0, self.nz, self.z_stride))

    def content_hash(self, material: MaterialParams, t_inlet: float) -> str:
        return stable_hash(
            "discretization",
            [
                self.dx,
                self.nz,
                self.z_stride,
                self.cg_tol,
                self.cg_max_iter,
                material.rho,
                material.cp,
                material.k,
                material.u,
                t_inlet,
            ],
        )


@dataclass
class StationSystem:
    """Assembled per-station SPD operator A and right-hand-side builder.

    A x = diag * x - k * sum of interior-neighbor values; the Robin and
    advection contributions live on the diagonal.  rhs(t_old) = a * t_old +
    robin_rhs.
    """

    diag: np.ndarray
    nb_pad: np.ndarray  # (n, 4), exterior neighbors point at the zero pad slot n
    k: float
    advect: float  # a = rho cp u dx^2 / dz
    robin_rhs: np.ndarray

    @property
    def n(self) -> int:
        return int(self.diag.shape[0])

    def matvec(self, x: np.ndarray) -> np.ndarray:
        xp = np.empty(self.n + 1)
        xp[:-1] = x
        xp[-1] = 0.0
        acc = xp[self.nb_pad[:, 0]]
        acc = acc + xp[self.nb_pad[:, 1]]
        acc += xp[self.nb_pad[:, 2]]
        acc += xp[self.nb_pad[:, 3]]
        return self.diag * x - self.k * acc

    def rhs(self, t_old: np.ndarray) -> np.ndarray:
        return self.advect * t_old + self.robin_rhs


def assemble_station_system(
    grid: VoxelGrid,
    material: MaterialParams,
    process: ProcessParams,
    dz: float,
) -> StationSystem:
    if dz <= 0:
        raise ConfigurationError("dz must be positive")
    n = grid.n_interior
    a = material.rho * material.cp * material.u * grid.dx**2 / dz
    n_faces = grid.boundary_counts().astype(float)
    robin_coeff = process.htc * grid.dx * n_faces
    interior_degree = (grid.neighbors >= 0).sum(axis=1).astype(float)
    diag = a + material.k * interior_degree + robin_coeff
    nb_pad = np.where(grid.neighbors < 0, n, grid.neighbors)
    return StationSystem(
        diag=diag,
        nb_pad=nb_pad,
        k=material.k,
        advect=a,
        robin_rhs=robin_coeff * process.t_ambient,
    )


def cg_solve(matvec, b: np.ndarray, x0: np.ndarray, tol: float, max_iter: int):
    """Plain conjugate gradients with a true-residual confirmation on exit.

    Returns (x, relative residual, iterations).  Raises ConvergenceError when
    max_iter is exhausted.
    """
    x = np.array(x0, dtype=float, copy=True)
    r = b - matvec(x)
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        b_norm = 1.0
    rs = float(r @ r)
    if np.sqrt(rs) <= tol * b_norm:
        return x, np.sqrt(rs) / b_norm, 0
    p = r.copy()
    for it in range(1, max_iter + 1):
        ap = matvec(p)
        alpha = rs / float(p @ ap)
        x += alpha * p
        r -= alpha * ap
        rs_new = float(r @ r)
        if np.sqrt(rs_new) <= tol * b_norm:
            true_r = b - matvec(x)
            true_norm = float(np.linalg.norm(true_r))
            if true_norm <= tol * b_norm:
                return x, true_norm / b_norm, it
            # recursive residual drifted; restart from the true residual
            r = true_r
            rs_new = true_norm * true_norm
            p = r.copy()
            rs = rs_new
            continue
        p = r + (rs_new / rs) * p
        rs = rs_new
    res = float(np.linalg.norm(b - matvec(x))) / b_norm
    raise ConvergenceError(
        f"conjugate gradients did not reach tol={tol:g} in {max_iter} iterations "
        f"(relative residual {res:.3e})",
        residual=res,
        iterations=max_iter,
    )


def solve_station(
    system: StationSystem,
    t_old: np.ndarray,
    cg_tol: float = 1e-10,
    cg_max_iter: int = 5000,
) -> np.ndarray:
    t_old = np.asarray(t_old, dtype=float)
    if t_old.shape != (system.n,):
        raise ValueError(f"field length {t_old.shape} does not match system size {system.n}")
    x, _, _ = cg_solve(system.matvec, system.rhs(t_old), t_old, cg_tol, cg_max_iter)
    return x


@dataclass
class Snapshot:
    """Flattened temperature field over (stored stations x interior cells),
    station-major, for one operating point."""

    values: np.ndarray
    param: ProcessParams
    geometry_hash: str
    discretization_hash: str
    stations_z: np.ndarray


def solve_fom(
    grid: VoxelGrid,
    material: MaterialParams,
    process: ProcessParams,
    disc: Discretization,
) -> Snapshot:
    """March the cross-section from the Dirichlet inlet to the outlet and
    record every z_stride-th station (station 0 is the inlet)."""
    n = grid.n_interior
    dz = grid.length / (disc.nz - 1)
    system = assemble_station_system(grid, material, process, dz)
    t = np.full(n, float(process.t_inlet))
    stored = [t.copy()]
    for m in range(1, disc.nz):
        t = solve_station(system, t, disc.cg_tol, disc.cg_max_iter)
        if m % disc.z_stride == 0:
            stored.append(t.copy())
    stations = np.array(disc.stored_stations(), dtype=float) * dz
    return Snapshot(
        values=np.concatenate(stored),
        param=process,
        geometry_hash="",
        discretization_hash="",
        stations_z=stations,
    )


def biot_fourier_report(
    material: MaterialParams,
    process: ProcessParams,
    geometry: ProfileGeometry,
    disc: Discretization,
) -> dict:
    """Dimensionless regime numbers: Biot htc*r1/k, outlet Fourier
    k*l/(rho*cp*u*r1^2) and Peclet u*l*rho*cp/k."""
    rc = material.rho * material.cp
    return {
        "biot": process.htc * geometry.r1 / material.k,
        "fourier_outlet": material.k * geometry.l / (rc * material.u * geometry.r1**2),
        "peclet": material.u * geometry.l * rc / material.k,
    }


# ---------------------------------------------------------------------------
# Snapshot batches and the binary snapshot store


@dataclass
class SnapshotSet:
    """A batch of snapshots: columns of ``values`` (N x Ns) align with
    ``params``."""

    values: np.ndarray
    params: list[ProcessParams]
    geometry_hash: str
    discretization_hash: str
    stations_z: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.values.ndim != 2:
            raise ValueError("values must be a 2D (N x Ns) matrix")
        if self.values.shape[1] != len(self.params):
            raise ValueError("column count must match the parameter list")

    @property
    def n_dof(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_snapshots(self) -> int:
        return int(self.values.shape[1])

    def param_matrix(self) -> np.ndarray:
        return np.array([[p.t_ambient, p.htc] for p in self.params], dtype=float)


_WORKER_CTX: tuple | None = None


def _worker_init(grid, material, disc):
    global _WORKER_CTX
    _WORKER_CTX = (grid, material, disc)


def _worker_solve(process: ProcessParams) -> np.ndarray:
    grid, material, disc = _WORKER_CTX
    return solve_fom(grid, material, process, disc).values


def generate_snapshot_matrix(
    grid: VoxelGrid,
    material: MaterialParams,
    disc: Discretization,
    params: list[ProcessParams],
    workers: int = 1,
) -> np.ndarray:
    """Solve the FOM for every operating point; columns in input order.

    Samples are independent, so workers > 1 fans the solves out over
    processes without changing the result.
    """
    if not params:
        raise ConfigurationError("no parameters to solve")
    if workers > 1:
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_worker_init,
            initargs=(grid, material, disc),
        ) as pool:
            columns = list(pool.map(_worker_solve, params))
    else:
        columns = [solve_fom(grid, material, p, disc).values for p in params]
    return np.asfortranarray(np.column_stack(columns))


def write_snapshot_store(path, snapshots: SnapshotSet) -> None:
    """One binary file per batch plus a JSON sidecar.

    Header: magic "SNAP", version u32, element type u32 (1 = float64 LE),
    N u64, Ns u64; then Ns contiguous column vectors.  Round-trips are
    bit-exact.
    """
    path = Path(path)
    values = np.asarray(snapshots.values, dtype="<f8")
    n, ns = values.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(SNAP_MAGIC, SNAP_VERSION, _ELEM_F8_LE, n, ns))
        fh.write(values.tobytes(order="F"))
    sidecar = {
        "format_version": SNAP_VERSION,
        "n_dof": n,
        "n_snapshots": ns,
        "params": [
            {"t_ambient": p.t_ambient, "htc": p.htc, "t_inlet": p.t_inlet}
            for p in snapshots.params
        ],
        "geometry_hash": snapshots.geometry_hash,
        "discretization_hash": snapshots.discretization_hash,
        "stations_z": [float(z) for z in snapshots.stations_z],
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }
    sidecar.update(snapshots.meta)
    with open(sidecar_path(path), "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=1, sort_keys=True)


def sidecar_path(path) -> Path:
    return Path(str(path) + ".json")


def read_snapshot_store(path) -> SnapshotSet:
    path = Path(path)
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise BundleFormatError("snapshot store header truncated")
        magic, version, elem, n, ns = _HEADER.unpack(header)
        if magic != SNAP_MAGIC:
            raise BundleFormatError("not a snapshot store (bad magic)")
        if version != SNAP_VERSION:
            raise BundleFormatError(f"unsupported snapshot store version {version}")
        if elem != _ELEM_F8_LE:
            raise BundleFormatError(f"unsupported element type {elem}")
        payload = fh.read(8 * n * ns)
        if len(payload) != 8 * n * ns:
            raise BundleFormatError("snapshot store payload truncated")
    values = np.frombuffer(payload, dtype="<f8").reshape((n, ns), order="F")
    try:
        with open(sidecar_path(path), "r", encoding="utf-8") as fh:
            meta = json.load(fh)
    except FileNotFoundError as exc:
        raise BundleFormatError(f"missing snapshot sidecar for {path}") from exc
    params = [
        ProcessParams(t_ambient=p["t_ambient"], htc=p["htc"], t_inlet=p["t_inlet"])
        for p in meta["params"]
    ]
    if len(params) != ns:
        raise BundleFormatError("sidecar parameter count does not match store")
    return SnapshotSet(
        values=np.asfortranarray(values),
        params=params,
        geometry_hash=meta.get("geometry_hash", ""),
        discretization_hash=meta.get("discretization_hash", ""),
        stations_z=np.array(meta.get("stations_z", []), dtype=float),
        meta={k: v for k, v in meta.items() if k not in {
            "format_version", "n_dof", "n_snapshots", "params",
            "geometry_hash", "discretization_hash", "stations_z",
        }},
    )
