"""Spherical geometry on a mean-radius Earth.

All angles are radians. Longitude differences are taken directly, without
wrapping across the antimeridian; ingest refuses journeys that cross it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MEAN_EARTH_RADIUS_KM = 6371.0
HALF_PI = math.pi / 2


@dataclass(frozen=True, slots=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self):
        if not (-HALF_PI <= self.lat <= HALF_PI):
            raise ValueError(f"latitude {self.lat!r} rad outside [-pi/2, pi/2]")
        if not (-math.pi <= self.lon < math.pi):
            raise ValueError(f"longitude {self.lon!r} rad outside [-pi, pi)")

    @classmethod
    def from_degrees(cls, lat_deg: float, lon_deg: float) -> GeoPoint:
        return cls(math.radians(lat_deg), math.radians(lon_deg))

    @property
    def lat_deg(self) -> float:
        return math.degrees(self.lat)

    @property
    def lon_deg(self) -> float:
        return math.degrees(self.lon)


@dataclass(frozen=True, slots=True)
class EarthModel:
    radius_km: float = MEAN_EARTH_RADIUS_KM

    def __post_init__(self):
        if not self.radius_km > 0:
            raise ValueError("earth radius must be positive")


DEFAULT_EARTH = EarthModel()


def central_angle(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle central angle between two points (haversine form)."""
    cc = math.cos(a.lat) * math.cos(b.lat)
    h = math.sin((b.lat - a.lat) / 2) ** 2 + math.sin((b.lon - a.lon) / 2) ** 2 * cc
    if h <= 0.5:
        return 2.0 * math.asin(math.sqrt(min(max(h, 0.0), 1.0)))
    # near-antipodal: measure to the antipode of b, where the inverse sine is well conditioned
    h_anti = math.sin((b.lat + a.lat) / 2) ** 2 + math.cos((b.lon - a.lon) / 2) ** 2 * cc
    return math.pi - 2.0 * math.asin(math.sqrt(min(max(h_anti, 0.0), 1.0)))


def great_circle_distance(a: GeoPoint, b: GeoPoint, earth: EarthModel = DEFAULT_EARTH) -> float:
    """Surface distance in km between two points."""
    return earth.radius_km * central_angle(a, b)


def haversine_angle(lat1, lon1, lat2, lon2):
    """Vectorised :func:`central_angle` over broadcastable arrays."""
    cc = np.cos(lat1) * np.cos(lat2)
    h = np.sin((lat2 - lat1) / 2) ** 2 + np.sin((lon2 - lon1) / 2) ** 2 * cc
    near = 2.0 * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))
    if not np.any(h > 0.5):
        return near
    h_anti = np.sin((lat2 + lat1) / 2) ** 2 + np.cos((lon2 - lon1) / 2) ** 2 * cc
    far = np.pi - 2.0 * np.arcsin(np.sqrt(np.clip(h_anti, 0.0, 1.0)))
    return np.where(h > 0.5, far, near)


def as_array(points: Iterable[GeoPoint] | np.ndarray) -> np.ndarray:
    """Stack points into an ``(n, 2)`` float array of ``[lat, lon]`` rows."""
    if isinstance(points, np.ndarray):
        arr = np.asarray(points, dtype=float)
        return arr.reshape(-1, 2)
    return np.array([(p.lat, p.lon) for p in points], dtype=float).reshape(-1, 2)


def as_points(coords: np.ndarray) -> list[GeoPoint]:
    return [GeoPoint(float(lat), float(lon)) for lat, lon in np.asarray(coords).reshape(-1, 2)]


def distances_from(point: GeoPoint, coords: np.ndarray, earth: EarthModel = DEFAULT_EARTH) -> np.ndarray:
    coords = as_array(coords)
    return earth.radius_km * haversine_angle(point.lat, point.lon, coords[:, 0], coords[:, 1])


def pairwise_distances(coords: np.ndarray, earth: EarthModel = DEFAULT_EARTH) -> np.ndarray:
    coords = as_array(coords)
    lat, lon = coords[:, 0], coords[:, 1]
    return earth.radius_km * haversine_angle(lat[:, None], lon[:, None], lat[None, :], lon[None, :])


def segment_lengths(coords: np.ndarray, earth: EarthModel = DEFAULT_EARTH) -> np.ndarray:
    """Distances between consecutive rows of a polyline."""
    coords = as_array(coords)
    return earth.radius_km * haversine_angle(coords[:-1, 0], coords[:-1, 1], coords[1:, 0], coords[1:, 1])


def cumulative_distance(coords: np.ndarray, earth: EarthModel = DEFAULT_EARTH) -> np.ndarray:
    return np.concatenate(([0.0], np.cumsum(segment_lengths(coords, earth))))


# --- unit-vector helpers -------------------------------------------------

def to_unit_vectors(coords: np.ndarray) -> np.ndarray:
    coords = as_array(coords)
    lat, lon = coords[:, 0], coords[:, 1]
    cl = np.cos(lat)
    return np.stack([cl * np.cos(lon), cl * np.sin(lon), np.sin(lat)], axis=1)


def from_unit_vectors(vecs: np.ndarray) -> np.ndarray:
    vecs = np.asarray(vecs, dtype=float).reshape(-1, 3)
    vecs = vecs / np.linalg.norm(vecs, axis=1, keepdims=True)
    lat = np.arcsin(np.clip(vecs[:, 2], -1.0, 1.0))
    lon = np.arctan2(vecs[:, 1], vecs[:, 0])
    return np.stack([lat, lon], axis=1)


def _angle_between(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    # atan2 form stays accurate for tiny and near-antipodal angles
    return np.arctan2(np.linalg.norm(np.cross(u, v), axis=-1), np.sum(u * v, axis=-1))


def interpolate(a: GeoPoint, b: GeoPoint, fraction: float) -> GeoPoint:
    """Point a given fraction of the way along the great circle from ``a`` to ``b``."""
    (u, v) = to_unit_vectors([a, b])
    omega = float(_angle_between(u, v))
    if omega == 0.0:
        return a
    w = (math.sin((1 - fraction) * omega) * u + math.sin(fraction * omega) * v) / math.sin(omega)
    lat, lon = from_unit_vectors(w)[0]
    return GeoPoint(float(lat), float(lon))


def densify(coords: np.ndarray, step_km: float, earth: EarthModel = DEFAULT_EARTH) -> np.ndarray:
    """Resample a polyline so no gap exceeds ``step_km``; original vertices are kept."""
    coords = as_array(coords)
    vecs = to_unit_vectors(coords)
    out = [coords[:1]]
    for i in range(len(coords) - 1):
        u, v = vecs[i], vecs[i + 1]
        omega = float(_angle_between(u, v))
        n = max(1, int(math.ceil(omega * earth.radius_km / step_km)))
        if omega == 0.0:
            continue
        f = np.arange(1, n + 1)[:, None] / n
        w = (np.sin((1 - f) * omega) * u + np.sin(f * omega) * v) / math.sin(omega)
        seg = from_unit_vectors(w)
        seg[-1] = coords[i + 1]
        out.append(seg)
    return np.concatenate(out)


def _chord_angle(p: np.ndarray, v: np.ndarray) -> np.ndarray:
    # angles between every row of p and every row of v, via chord length
    chord = np.sqrt(np.maximum(np.sum(p * p, 1)[:, None] + np.sum(v * v, 1)[None, :] - 2.0 * p @ v.T, 0.0))
    return 2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0))


def distance_to_polyline(coords: np.ndarray, polyline: np.ndarray,
                         earth: EarthModel = DEFAULT_EARTH, chunk: int = 1024) -> np.ndarray:
    """Shortest distance in km from each point to a great-circle polyline."""
    p = to_unit_vectors(coords)
    line = to_unit_vectors(polyline)
    a, b = line[:-1], line[1:]
    normal = np.cross(a, b)
    norm = np.linalg.norm(normal, axis=1)
    proper = norm > 0.0
    normal = np.where(proper[:, None], normal / np.where(proper, norm, 1.0)[:, None], 0.0)
    # the foot of the perpendicular lies on the arc iff p is on the inner side of both ends
    side_a, side_b = np.cross(normal, a), np.cross(b, normal)
    out = np.empty(len(p))
    for s in range(0, len(p), chunk):
        q = p[s:s + chunk]
        to_vertex = _chord_angle(q, line)
        best = to_vertex.min(axis=1)
        if len(line) > 1:
            inside = (q @ side_a.T >= 0) & (q @ side_b.T >= 0) & proper[None, :]
            cross_track = np.abs(np.arcsin(np.clip(q @ normal.T, -1.0, 1.0)))
            best = np.minimum(best, np.where(inside, cross_track, np.inf).min(axis=1))
        out[s:s + chunk] = best
    return earth.radius_km * out


def hausdorff_distance(path: np.ndarray, reference: np.ndarray, step_km: float = 1.0,
                       earth: EarthModel = DEFAULT_EARTH) -> float:
    """Symmetric Hausdorff distance in km between two polylines.

    Each side is densified to ``step_km`` and measured against the other
    polyline's segments, so the result is exact up to ``step_km / 2``.
    """
    a = densify(path, step_km, earth)
    b = densify(reference, step_km, earth)
    return float(max(distance_to_polyline(a, reference, earth).max(),
                     distance_to_polyline(b, path, earth).max()))


def polyline_length(points: Sequence[GeoPoint] | np.ndarray, earth: EarthModel = DEFAULT_EARTH) -> float:
    return float(segment_lengths(as_array(points), earth).sum())
