"""Canonical trajectory: build pipeline and file export/import."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..geo import DEFAULT_EARTH, EarthModel, GeoPoint, as_array, as_points, cumulative_distance, distances_from
from ..ingest import PortGeofence
from .kalman import KalmanParams, kalman_smooth
from .ordering import order_indices
from .scan import HistoricalSet, ScanError, ScanMethod, ScanParams, scan_coords


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Trajectory:
    coords: np.ndarray          # (n, 2) [lat, lon] radians, origin first
    method: ScanParams
    cumulative_km: np.ndarray
    earth: EarthModel = field(default=DEFAULT_EARTH)

    def __post_init__(self):
        coords = np.array(self.coords, dtype=float).reshape(-1, 2)
        cum = np.array(self.cumulative_km, dtype=float).ravel()
        if len(coords) < 2:
            raise ConstructionError("a trajectory needs at least two points")
        if len(cum) != len(coords) or cum[0] != 0.0 or np.any(np.diff(cum) < 0):
            raise ConstructionError("cumulative distance must start at 0 and never decrease")
        for a in (coords, cum):
            a.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "cumulative_km", cum)

    @classmethod
    def from_coords(cls, coords, method: ScanParams, earth: EarthModel = DEFAULT_EARTH) -> Trajectory:
        coords = as_array(coords)
        return cls(coords, method, cumulative_distance(coords, earth), earth)

    @property
    def points(self) -> list[GeoPoint]:
        return as_points(self.coords)

    @property
    def length_km(self) -> float:
        return float(self.cumulative_km[-1])

    def __len__(self) -> int:
        return len(self.coords)


def build_trajectory(K: HistoricalSet, scan: ScanParams, kalman: KalmanParams,
                     origin: PortGeofence, destination: PortGeofence,
                     earth: EarthModel = DEFAULT_EARTH) -> Trajectory:
    """Scan, order, smooth and measure: historical points to a canonical route."""
    try:
        raw = scan_coords(K, scan)
    except ScanError as exc:
        raise ConstructionError(str(exc)) from exc
    ordered = raw[order_indices(raw, origin.center, destination.center)]
    if len(ordered) < 2:
        raise ConstructionError("ordering collapsed to a single point; origin and destination too close")
    smoothed = kalman_smooth(ordered, kalman)
    traj = Trajectory.from_coords(smoothed, scan, earth)
    slack = scan.eta_rad * earth.radius_km
    for end, port in ((smoothed[0], origin), (smoothed[-1], destination)):
        gap = float(distances_from(port.center, end[None, :], earth)[0])
        if gap > port.radius_km + slack:
            raise ConstructionError(f"trajectory end is {gap:.1f} km from {port.name}, "
                                    f"beyond geofence radius + scanning interval")
    return traj


# --- export --------------------------------------------------------------

def trajectory_stem(origin: str, destination: str, scan: ScanParams) -> str:
    return f"{origin}-{destination}_{scan.method.value}_eta{scan.eta:.2f}"


def to_geojson(traj: Trajectory, **properties) -> dict:
    coords = [[math.degrees(lon), math.degrees(lat)] for lat, lon in traj.coords]
    props = {
        "method": traj.method.method.value,
        "eta_deg": traj.method.eta,
        "min_bin_count": traj.method.min_bin_count,
        "earth_radius_km": traj.earth.radius_km,
        "cumulative_km": [float(c) for c in traj.cumulative_km],
        "coords_rad": [[float(lat), float(lon)] for lat, lon in traj.coords],
        **properties,
    }
    return {"type": "Feature", "geometry": {"type": "LineString", "coordinates": coords}, "properties": props}


def from_geojson(doc: dict) -> Trajectory:
    if doc.get("type") == "FeatureCollection":
        doc = doc["features"][0]
    props = doc.get("properties") or {}
    scan = ScanParams(float(props.get("eta_deg", 1.0)), ScanMethod(props.get("method", "latlon")),
                      int(props.get("min_bin_count", 3)))
    earth = EarthModel(float(props.get("earth_radius_km", DEFAULT_EARTH.radius_km)))
    if "coords_rad" in props:
        coords = np.array(props["coords_rad"], dtype=float)
    else:
        coords = np.radians(np.array(doc["geometry"]["coordinates"], dtype=float)[:, ::-1])
    if "cumulative_km" in props:
        return Trajectory(coords, scan, np.array(props["cumulative_km"], dtype=float), earth)
    return Trajectory.from_coords(coords, scan, earth)


def write_trajectory(traj: Trajectory, directory, stem: str, **properties) -> tuple[Path, Path]:
    """Write ``<stem>.geojson`` and the sidecar ``<stem>.csv``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    gj, sidecar = directory / f"{stem}.geojson", directory / f"{stem}.csv"
    with open(gj, "w", encoding="utf-8") as f:
        json.dump(to_geojson(traj, **properties), f)
        f.write("\n")
    with open(sidecar, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["index", "lat_deg", "lon_deg", "cumulative_km"])
        for i, ((lat, lon), c) in enumerate(zip(traj.coords, traj.cumulative_km)):
            w.writerow([i, repr(math.degrees(lat)), repr(math.degrees(lon)), repr(float(c))])
    return gj, sidecar


def read_trajectory(path) -> Trajectory:
    """Load a trajectory from its GeoJSON file or its sidecar CSV."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with open(path, newline="", encoding="utf-8") as f:
            rows = list(csv.DictReader(f))
        coords = np.radians([[float(r["lat_deg"]), float(r["lon_deg"])] for r in rows])
        cum = np.array([float(r["cumulative_km"]) for r in rows])
        gj = path.with_suffix(".geojson")
        if gj.exists():
            base = read_trajectory(gj)
            return Trajectory(coords, base.method, cum, base.earth)
        return Trajectory(coords, ScanParams(1.0), cum)
    with open(path, encoding="utf-8") as f:
        return from_geojson(json.load(f))
