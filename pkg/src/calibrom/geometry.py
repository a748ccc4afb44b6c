"""Dumbbell cross-section and its rasterization onto a uniform voxel grid.

The profile is the union of two circles bridged by a rectangular bar:
circle 1 of radius ``r1`` centered at the origin, circle 2 of radius ``r2``
centered at ``(r1 + w + r2, 0)``, and a bar spanning ``x in [0,
center_distance]`` with half-height ``min(h/2, r2)`` so the bar never
overhangs the small circle.  ``r2 = 0`` collapses the profile to a single
circle of radius ``r1`` (the bar degenerates to a zero-height strip).

The grid is axis-aligned with the origin at the circle-1 center and is
symmetric in y: cell centers sit at ``(j + 0.5 - ny/2) * dx`` so every
interior cell has an exact mirror partner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ResolutionError
from .hashutil import stable_hash

FACE_NORMALS = ("+x", "-x", "+y", "-y")
FACE_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))


@dataclass(frozen=True)
class ProfileGeometry:
    """Dumbbell profile dimensions in meters."""

    r1: float = 0.006
    r2: float = 0.0033
    h: float = 0.01
    w: float = 0.003
    l: float = 1.0

    def __post_init__(self):
        if not (self.r1 > 0 and self.h > 0 and self.l > 0):
            raise ConfigurationError("r1, h and l must be positive")
        if self.r2 < 0 or self.w < 0:
            raise ConfigurationError("r2 and w must be non-negative")

    @property
    def center_distance(self) -> float:
        """Distance between the two circle centers (bar bridges the gap)."""
        return self.r1 + self.w + self.r2

    @property
    def bar_half_height(self) -> float:
        return min(0.5 * self.h, self.r2)

    def contains(self, x: float, y: float) -> bool:
        """Point-in-profile test (closed set)."""
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError("coordinates must be finite")
        if x * x + y * y <= self.r1 * self.r1:
            return True
        cd = self.center_distance
        if self.r2 > 0 and (x - cd) ** 2 + y * y <= self.r2 * self.r2:
            return True
        b = self.bar_half_height
        return b > 0 and 0.0 <= x <= cd and -b <= y <= b

    def grid_hash(self, dx: float) -> str:
        return stable_hash("geometry", [self.r1, self.r2, self.h, self.w, self.l, dx])


@dataclass
class VoxelGrid:
    """Rasterized cross-section with compact interior indexing.

    Compact indices follow the row-major scan of the (ny, nx) cell array:
    row j (y) outer, column i (x) inner.  ``interior_map[j * nx + i]`` holds
    the compact index or -1 for exterior cells.  ``neighbors[c, d]`` is the
    compact index of the 4-neighbor of cell c in direction FACE_NORMALS[d],
    or -1 when that neighbor is exterior; every -1 entry owns exactly one
    boundary face.
    """

    dx: float
    nx: int
    ny: int
    x0: float
    y0: float
    length: float
    interior_map: np.ndarray
    cells: np.ndarray
    neighbors: np.ndarray
    face_cells: np.ndarray
    face_normals: np.ndarray

    @property
    def n_interior(self) -> int:
        return int(self.cells.shape[0])

    @property
    def n_boundary_faces(self) -> int:
        return int(self.face_cells.shape[0])

    def cell_centers(self) -> np.ndarray:
        xs = self.x0 + self.dx * self.cells[:, 0]
        ys = self.y0 + self.dx * self.cells[:, 1]
        return np.column_stack([xs, ys])

    def boundary_counts(self) -> np.ndarray:
        """Number of boundary faces owned by each interior cell."""
        return np.bincount(self.face_cells, minlength=self.n_interior).astype(np.int64)

    def mirror_permutation(self) -> np.ndarray:
        """Compact-index permutation of the y-reflection (j -> ny-1-j)."""
        i = self.cells[:, 0]
        j = self.ny - 1 - self.cells[:, 1]
        perm = self.interior_map[j * self.nx + i]
        if np.any(perm < 0):
            raise ValueError("grid is not mirror symmetric")
        return perm

    def summary(self) -> dict:
        return {
            "nx": self.nx,
            "ny": self.ny,
            "dx": self.dx,
            "n_interior": self.n_interior,
            "n_boundary_faces": self.n_boundary_faces,
        }


def rasterize(geometry: ProfileGeometry, dx: float) -> VoxelGrid:
    """Rasterize by cell-center containment (midpoint rule).

    Requires dx <= min_feature/2 where min_feature is r2 (or r1 for the
    single-circle degenerate case) so the smallest feature is resolved.
    """
    if not (dx > 0 and math.isfinite(dx)):
        raise ConfigurationError("dx must be positive and finite")
    min_feature = geometry.r2 if geometry.r2 > 0 else geometry.r1
    if dx > min_feature / 2:
        raise ResolutionError(
            f"dx={dx:g} too coarse: must be <= {min_feature / 2:g} "
            "to resolve the smallest feature"
        )

    half_rows = int(math.ceil(geometry.r1 / dx)) + 1
    ny = 2 * half_rows
    y0 = (0.5 - half_rows) * dx
    i0 = half_rows
    right_extent = geometry.center_distance + (geometry.r2 if geometry.r2 > 0 else 0.0)
    nx = i0 + int(math.ceil(right_extent / dx)) + 2
    x0 = (0.5 - i0) * dx

    ii = np.arange(nx)
    jj = np.arange(ny)
    xs = (ii + 0.5 - i0) * dx
    ys = (jj + 0.5 - half_rows) * dx
    X, Y = np.meshgrid(xs, ys)  # (ny, nx)

    cd = geometry.center_distance
    b = geometry.bar_half_height
    mask = X * X + Y * Y <= geometry.r1 * geometry.r1
    in_circle2 = np.zeros_like(mask)
    if geometry.r2 > 0:
        in_circle2 = (X - cd) ** 2 + Y * Y <= geometry.r2 * geometry.r2
        mask |= in_circle2
    if b > 0:
        mask |= (X >= 0.0) & (X <= cd) & (np.abs(Y) <= b)

    n_interior = int(mask.sum())
    if n_interior == 0:
        raise ResolutionError("no interior cells at this resolution")
    if geometry.r2 > 0 and not in_circle2.any():
        raise ResolutionError("small circle unresolved at this resolution")

    interior_map = np.full(ny * nx, -1, dtype=np.int64)
    flat = mask.ravel()
    interior_map[flat] = np.arange(n_interior, dtype=np.int64)
    j_idx, i_idx = np.nonzero(mask)
    cells = np.column_stack([i_idx, j_idx]).astype(np.int64)

    neighbors = np.full((n_interior, 4), -1, dtype=np.int64)
    for d, (di, dj) in enumerate(FACE_STEPS):
        ni = cells[:, 0] + di
        nj = cells[:, 1] + dj
        ok = (ni >= 0) & (ni < nx) & (nj >= 0) & (nj < ny)
        flat_n = np.where(ok, nj * nx + ni, 0)
        vals = np.where(ok, interior_map[flat_n], -1)
        neighbors[:, d] = vals

    exposed = neighbors < 0  # (n, 4), row-major flatten keeps per-cell direction order
    face_flat = np.nonzero(exposed.ravel())[0]
    face_cells = (face_flat // 4).astype(np.int64)
    face_normals = (face_flat % 4).astype(np.uint8)

    return VoxelGrid(
        dx=dx,
        nx=nx,
        ny=ny,
        x0=float(xs[0]),
        y0=float(ys[0]),
        length=geometry.l,
        interior_map=interior_map,
        cells=cells,
        neighbors=neighbors,
        face_cells=face_cells,
        face_normals=face_normals,
    )


@dataclass(frozen=True)
class RegionMasks:
    """Interior-index sets used by the qualitative temperature checks."""

    large_cylinder_core: np.ndarray
    small_cylinder_core: np.ndarray
    surface_ring: np.ndarray

    def __post_init__(self):
        overlap = np.intersect1d(self.large_cylinder_core, self.small_cylinder_core)
        if overlap.size:
            raise ConfigurationError("cylinder core regions overlap")


def region_masks(grid: VoxelGrid, geometry: ProfileGeometry) -> RegionMasks:
    """Core regions (within half-radius of each circle center) and the
    ring of cells owning at least one boundary face."""
    centers = grid.cell_centers()
    x = centers[:, 0]
    y = centers[:, 1]
    large = np.nonzero(x * x + y * y <= (geometry.r1 / 2) ** 2)[0]
    cd = geometry.center_distance
    if geometry.r2 > 0:
        small = np.nonzero((x - cd) ** 2 + y * y <= (geometry.r2 / 2) ** 2)[0]
    else:
        small = np.empty(0, dtype=np.int64)
    if large.size == 0 or small.size == 0:
        raise ResolutionError("empty cylinder core region at this resolution")
    surface = np.unique(grid.face_cells)
    return RegionMasks(
        large_cylinder_core=large.astype(np.int64),
        small_cylinder_core=small.astype(np.int64),
        surface_ring=surface.astype(np.int64),
    )
