"""Deployment geometry: the square region, hex guide grid, uniform drops
and torus-wrapped distances.

All horizontal coordinates and distances are in km; antenna heights are
entered in metres and converted exactly once when a 3D distance is formed.
The region is the half-open square [0, side)^2 treated as a torus, which
removes the edge-of-map interference underestimation that a bounded square
would suffer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng as _rng


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Region:
    side_km: float

    def __post_init__(self):
        if not (self.side_km > 0.0 and math.isfinite(self.side_km)):
            raise GeometryError(f"region side must be positive, got {self.side_km}")

    @property
    def area_km2(self) -> float:
        return self.side_km * self.side_km

    def contains(self, x_km: float, y_km: float) -> bool:
        return 0.0 <= x_km < self.side_km and 0.0 <= y_km < self.side_km


@dataclass(frozen=True)
class Point2D:
    x_km: float
    y_km: float

    def __post_init__(self):
        if not (math.isfinite(self.x_km) and math.isfinite(self.y_km)):
            raise GeometryError("point coordinates must be finite")


@dataclass(frozen=True)
class MacroGrid:
    """Hexagonal macro-site lattice used as display/guide metadata."""

    inter_site_distance_km: float
    site_centers: tuple[Point2D, ...]
    sectors_per_site: int = 3


@dataclass(frozen=True)
class Deployment:
    region: Region
    bs_x: np.ndarray
    bs_y: np.ndarray
    bs_antenna_height_m: float
    ue_antenna_height_m: float
    macro_grid: MacroGrid | None = field(default=None, compare=False)

    def __post_init__(self):
        bs_x = np.ascontiguousarray(self.bs_x, dtype=np.float64)
        bs_y = np.ascontiguousarray(self.bs_y, dtype=np.float64)
        object.__setattr__(self, "bs_x", bs_x)
        object.__setattr__(self, "bs_y", bs_y)
        if bs_x.shape != bs_y.shape or bs_x.ndim != 1:
            raise GeometryError("bs coordinate arrays must be 1-D and equal length")
        side = self.region.side_km
        if bs_x.size and not (
            (bs_x >= 0.0).all() and (bs_x < side).all()
            and (bs_y >= 0.0).all() and (bs_y < side).all()
        ):
            raise GeometryError("all BS positions must lie inside the region")
        if not (self.bs_antenna_height_m >= self.ue_antenna_height_m >= 0.0):
            raise GeometryError("need bs_antenna_height_m >= ue_antenna_height_m >= 0")

    @property
    def n_bs(self) -> int:
        return int(self.bs_x.size)

    @property
    def delta_h_m(self) -> float:
        return self.bs_antenna_height_m - self.ue_antenna_height_m

    def with_bs(self, x_km: float, y_km: float) -> "Deployment":
        if not self.region.contains(x_km, y_km):
            raise GeometryError("BS outside region")
        return Deployment(
            self.region,
            np.append(self.bs_x, x_km),
            np.append(self.bs_y, y_km),
            self.bs_antenna_height_m,
            self.ue_antenna_height_m,
            self.macro_grid,
        )

    def without_bs(self, index: int) -> "Deployment":
        if not (0 <= index < self.n_bs):
            raise GeometryError("BS index out of range")
        if self.n_bs == 1:
            raise GeometryError("cannot remove the last BS")
        return Deployment(
            self.region,
            np.delete(self.bs_x, index),
            np.delete(self.bs_y, index),
            self.bs_antenna_height_m,
            self.ue_antenna_height_m,
            self.macro_grid,
        )


def build_macro_grid(region: Region, isd_km: float) -> MacroGrid:
    """Hex-lattice site centers falling inside the region.

    Rows are isd*sqrt(3)/2 apart with alternate rows shifted by isd/2; the
    lattice is anchored at the region center so the guide grid is symmetric.
    """
    if not (isd_km > 0.0 and math.isfinite(isd_km)):
        raise GeometryError(f"inter-site distance must be positive, got {isd_km}")
    side = region.side_km
    cx = cy = side / 2.0
    row_h = isd_km * math.sqrt(3.0) / 2.0
    eps = 1e-9 * max(side, isd_km)
    centers: list[Point2D] = []
    k_max = int(math.ceil(side / row_h)) + 1
    m_max = int(math.ceil(side / isd_km)) + 1
    for k in range(-k_max, k_max + 1):
        y = cy + k * row_h
        if not (-eps <= y < side + eps):
            continue
        x_off = isd_km / 2.0 if k % 2 else 0.0
        for m in range(-m_max, m_max + 1):
            x = cx + x_off + m * isd_km
            if -eps <= x < side + eps:
                centers.append(Point2D(min(max(x, 0.0), side), min(max(y, 0.0), side)))
    return MacroGrid(isd_km, tuple(centers))


def deploy_bs(region: Region, lambda_bs_per_km2: float, rng: _rng.Stream) -> Deployment:
    """Place round(lambda * area) BSs i.i.d. uniform on the region.

    The count is deterministic rather than Poisson: one drawn deployment
    per scenario keeps the realized density equal to the configured one.
    """
    if lambda_bs_per_km2 < 0.0:
        raise GeometryError("BS density must be >= 0")
    n = int(round(lambda_bs_per_km2 * region.area_km2))
    idx = np.arange(n)
    x = rng.u01_array(_rng.P_BS_X, idx) * region.side_km
    y = rng.u01_array(_rng.P_BS_Y, idx) * region.side_km
    return Deployment(region, x, y, bs_antenna_height_m=0.0, ue_antenna_height_m=0.0)


def drop_ues(
    region: Region, rho_ues_per_km2: float, rng: _rng.Stream, first_counter: int = 0
) -> np.ndarray:
    """Drop round(rho * area) UEs uniformly; returns an (m, 2) array.

    `first_counter` selects the starting draw counter so a caller can
    reserve low counters (the engine keys background UE k by counter k).
    """
    if rho_ues_per_km2 < 0.0:
        raise GeometryError("UE density must be >= 0")
    m = int(round(rho_ues_per_km2 * region.area_km2))
    idx = np.arange(first_counter, first_counter + m)
    x = rng.u01_array(_rng.P_UE_X, idx) * region.side_km
    y = rng.u01_array(_rng.P_UE_Y, idx) * region.side_km
    return np.column_stack([x, y]) if m else np.empty((0, 2))


def wrap_delta(delta: float, side: float) -> float:
    """Reduce a coordinate delta to the torus range [-side/2, side/2]."""
    d = math.fmod(delta, side)
    if d > side / 2.0:
        d -= side
    elif d < -side / 2.0:
        d += side
    return d


def torus_distance_2d(a: Point2D, b: Point2D, region: Region) -> float:
    if not (region.contains(a.x_km, a.y_km) and region.contains(b.x_km, b.y_km)):
        raise GeometryError("points must lie inside the region")
    dx = wrap_delta(a.x_km - b.x_km, region.side_km)
    dy = wrap_delta(a.y_km - b.y_km, region.side_km)
    return math.hypot(dx, dy)


def distance_3d(d_km: float, delta_h_m: float) -> float:
    """3D separation from a horizontal distance and an antenna height gap."""
    if d_km < 0.0 or delta_h_m < 0.0:
        raise GeometryError("distances must be >= 0")
    return math.hypot(d_km, delta_h_m / 1000.0)


def torus_d2(
    x_km: np.ndarray, y_km: np.ndarray, px_km: float, py_km: float, side_km: float
) -> np.ndarray:
    """Vectorized squared 2D torus distances from (px, py) to many points."""
    dx = np.abs(np.asarray(x_km) - px_km) % side_km
    dy = np.abs(np.asarray(y_km) - py_km) % side_km
    dx = np.minimum(dx, side_km - dx)
    dy = np.minimum(dy, side_km - dy)
    return dx * dx + dy * dy


def torus_distances(
    x_km: np.ndarray, y_km: np.ndarray, px_km: float, py_km: float, side_km: float
) -> np.ndarray:
    """Vectorized 2D torus distances from (px, py) to many points."""
    return np.sqrt(torus_d2(x_km, y_km, px_km, py_km, side_km))
