"""Latitude / longitude line scans over a pooled historical point cloud."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..geo import GeoPoint, as_array, as_points, haversine_angle
from .density import density_mode


class ScanError(ValueError):
    pass


class ScanMethod(str, enum.Enum):
    LAT = "lat"
    LON = "lon"
    LATLON = "latlon"

    @property
    def label(self) -> str:
        return {"lat": "Lat-Scan", "lon": "Lon-Scan", "latlon": "LatLon-Scan"}[self.value]


@dataclass(frozen=True)
class ScanParams:
    eta: float  # scanning interval, degrees
    method: ScanMethod = ScanMethod.LATLON
    min_bin_count: int = 3

    def __post_init__(self):
        object.__setattr__(self, "method", ScanMethod(self.method))
        if not self.eta > 0:
            raise ValueError("scanning interval must be positive")
        if self.min_bin_count < 1:
            raise ValueError("min_bin_count must be at least 1")

    @classmethod
    def from_radians(cls, eta_rad: float, method=ScanMethod.LATLON, min_bin_count: int = 3) -> ScanParams:
        return cls(math.degrees(eta_rad), method, min_bin_count)

    @property
    def eta_rad(self) -> float:
        return math.radians(self.eta)


@dataclass(frozen=True, eq=False)
class HistoricalSet:
    """Pooled ``[lat, lon]`` rows (radians) from many journeys of one OD pair."""
    coords: np.ndarray
    source_journey_count: int = 0

    def __post_init__(self):
        coords = np.ascontiguousarray(self.coords, dtype=float).reshape(-1, 2)
        if len(coords) == 0:
            raise ValueError("historical set is empty")
        if not np.all(np.isfinite(coords)):
            raise ValueError("historical set has non-finite coordinates")
        if np.any(np.abs(coords[:, 0]) > math.pi / 2) or np.any(coords[:, 1] < -math.pi) \
                or np.any(coords[:, 1] >= math.pi):
            raise ValueError("historical set has coordinates out of range")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_points(cls, points: Iterable[GeoPoint], source_journey_count: int = 0) -> HistoricalSet:
        return cls(as_array(list(points)), source_journey_count)

    @classmethod
    def from_journeys(cls, journeys) -> HistoricalSet:
        journeys = list(journeys)
        if not journeys:
            raise ValueError("no journeys to pool")
        return cls(np.concatenate([j.coords() for j in journeys]), len(journeys))

    @property
    def points(self) -> list[GeoPoint]:
        return as_points(self.coords)

    def bounds(self) -> tuple[float, float, float, float]:
        """``(lat_min, lat_max, lon_min, lon_max)``."""
        lat, lon = self.coords[:, 0], self.coords[:, 1]
        return float(lat.min()), float(lat.max()), float(lon.min()), float(lon.max())


def _line_assignment(values: np.ndarray, eta: float) -> tuple[np.ndarray, np.ndarray]:
    """Map each value to its scan line, lines at ``vmin + k*eta`` up to ``vmax``.

    Line ``k`` captures ``[c_k - eta/2, c_k + eta/2)``. Returns the line
    centres and each value's line index (-1 when no line captures it).
    """
    vmin, vmax = float(values.min()), float(values.max())
    # a line whose centre is within rounding of vmax still counts
    top = vmax + 1e-9 * eta
    n_lines = int(math.floor((vmax - vmin) / eta)) + 1
    while n_lines > 1 and vmin + (n_lines - 1) * eta > top:
        n_lines -= 1
    while vmin + n_lines * eta <= top:
        n_lines += 1
    centres = vmin + np.arange(n_lines) * eta
    k = np.floor((values - vmin) / eta + 0.5).astype(np.int64)
    k = np.clip(k, 0, n_lines)
    # correct floor() rounding against the exact half-open window test
    c = vmin + k * eta
    k = np.where(values < c - eta / 2, k - 1, k)
    c = vmin + k * eta
    k = np.where(values >= c + eta / 2, k + 1, k)
    k = np.where((k >= 0) & (k < n_lines), k, -1)
    return centres, k


def _axis_scan(coords: np.ndarray, params: ScanParams, axis: int) -> np.ndarray:
    scan_vals = coords[:, axis]
    other = coords[:, 1 - axis]
    centres, k = _line_assignment(scan_vals, params.eta_rad)
    order = np.argsort(k, kind="stable")
    k_sorted = k[order]
    starts = np.searchsorted(k_sorted, np.arange(len(centres)), side="left")
    ends = np.searchsorted(k_sorted, np.arange(len(centres)), side="right")
    rows = []
    for line, (a, b) in enumerate(zip(starts, ends)):
        if b - a >= params.min_bin_count:
            mode = density_mode(other[order[a:b]])
            rows.append((centres[line], mode) if axis == 0 else (mode, centres[line]))
    return np.array(rows, dtype=float).reshape(-1, 2)


def _check(rows: np.ndarray, what: str) -> np.ndarray:
    if len(rows) < 2:
        raise ScanError(f"{what} emitted {len(rows)} point(s); interval too coarse or data too sparse")
    return rows


def lat_scan_coords(K: HistoricalSet, params: ScanParams) -> np.ndarray:
    return _check(_axis_scan(K.coords, params, 0), "latitude scan")


def lon_scan_coords(K: HistoricalSet, params: ScanParams) -> np.ndarray:
    return _check(_axis_scan(K.coords, params, 1), "longitude scan")


def latlon_scan_coords(K: HistoricalSet, params: ScanParams) -> np.ndarray:
    """Deduplicated union of both single-axis scans; latitude-scan points win."""
    lat_rows = _axis_scan(K.coords, params, 0)
    lon_rows = _axis_scan(K.coords, params, 1)
    radius = params.eta_rad / 10.0  # duplicate threshold eta*R/10, as a central angle
    dup = np.zeros(len(lon_rows), dtype=bool)
    if len(lat_rows) and len(lon_rows):
        cross = haversine_angle(lon_rows[:, None, 0], lon_rows[:, None, 1], lat_rows[None, :, 0], lat_rows[None, :, 1])
        dup = (cross < radius).any(axis=1)
    among = haversine_angle(lon_rows[:, None, 0], lon_rows[:, None, 1], lon_rows[None, :, 0], lon_rows[None, :, 1])
    kept_lon: list[int] = []
    for i in np.flatnonzero(~dup):
        if not np.any(among[i, kept_lon] < radius):
            kept_lon.append(i)
    kept = np.vstack([lat_rows, lon_rows[kept_lon]])
    return _check(kept.reshape(-1, 2), "lat/lon scan")


def lat_scan(K: HistoricalSet, params: ScanParams) -> list[GeoPoint]:
    return as_points(lat_scan_coords(K, params))


def lon_scan(K: HistoricalSet, params: ScanParams) -> list[GeoPoint]:
    return as_points(lon_scan_coords(K, params))


def latlon_scan(K: HistoricalSet, params: ScanParams) -> list[GeoPoint]:
    return as_points(latlon_scan_coords(K, params))


def scan_coords(K: HistoricalSet, params: ScanParams) -> np.ndarray:
    if params.method is ScanMethod.LAT:
        return lat_scan_coords(K, params)
    if params.method is ScanMethod.LON:
        return lon_scan_coords(K, params)
    return latlon_scan_coords(K, params)
