"""Synthetic AIS-like voyages along known routes, with ground truth.

Randomness comes from numpy's PCG64 generator. Vessel ``i`` of a fleet
generated with ``seed`` draws from ``PCG64(SeedSequence([seed, i]))``, so
output is reproducible and independent of how vessels are scheduled.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta, timezone
from typing import Sequence

import numpy as np

from .geo import (DEFAULT_EARTH, EarthModel, GeoPoint, as_array, from_unit_vectors, polyline_length,
                  segment_lengths, to_unit_vectors)
from .ingest import PortGeofence, PositionReport, write_reports

KNOT_KMH = 1.852
DEFAULT_START = datetime(2021, 3, 1, tzinfo=timezone.utc)
STOP_SOG_MAX = 0.2  # knots reported while stopped


@dataclass(frozen=True)
class RouteSpec:
    waypoints: tuple[GeoPoint, ...]
    speed_knots: float = 14.0
    speed_jitter: float = 0.0           # fractional std-dev of per-leg speed
    cross_track_sigma_km: float = 0.0
    report_interval_minutes: float = 30.0
    stops: tuple[tuple[int, float], ...] = ()  # (waypoint index, hours)

    def __post_init__(self):
        object.__setattr__(self, "waypoints", tuple(self.waypoints))
        object.__setattr__(self, "stops", tuple((int(i), float(h)) for i, h in self.stops))
        if len(self.waypoints) < 2:
            raise ValueError("a route needs at least two waypoints")
        if not self.speed_knots > 0:
            raise ValueError("speed must be positive")
        if min(self.speed_jitter, self.cross_track_sigma_km) < 0 or not self.report_interval_minutes > 0:
            raise ValueError("noise parameters must be non-negative and the report interval positive")
        for i, hours in self.stops:
            if not 0 < i < len(self.waypoints) - 1 or hours < 0:
                raise ValueError(f"stop at waypoint {i} must be intermediate with non-negative duration")

    def reversed(self) -> RouteSpec:
        last = len(self.waypoints) - 1
        return replace(self, waypoints=self.waypoints[::-1],
                       stops=tuple(sorted((last - i, h) for i, h in self.stops)))

    def length_km(self, earth: EarthModel = DEFAULT_EARTH) -> float:
        return polyline_length(self.waypoints, earth)


@dataclass(frozen=True)
class VoyageTruth:
    vessel_id: str
    voyage: int
    departure: datetime
    arrival: datetime
    true_ata_days: float       # sailing time, stops excluded
    true_distance_km: float
    polyline: np.ndarray = field(repr=False)
    stops: tuple[tuple[float, float], ...] = ()  # epoch-second intervals
    reports: tuple[PositionReport, ...] = field(default=(), repr=False)


@dataclass
class SyntheticFleet:
    reports: list[PositionReport]
    truth: list[VoyageTruth]

    def write(self, reports_path, truth_path) -> None:
        write_reports(self.reports, reports_path)
        write_truth(self.truth, truth_path)


def vessel_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


def _quantize_deg(coords: np.ndarray) -> np.ndarray:
    return np.radians(np.round(np.degrees(coords), 7))


def _offset(units: np.ndarray, normal: np.ndarray, km: np.ndarray, earth: EarthModel) -> np.ndarray:
    delta = km / earth.radius_km
    return np.cos(delta)[:, None] * units + np.sin(delta)[:, None] * normal[None, :]


def _voyage(spec: RouteSpec, rng: np.random.Generator, vessel_id: str, voyage: int,
            departure: datetime, earth: EarthModel) -> VoyageTruth:
    wp = as_array(spec.waypoints)
    units = to_unit_vectors(wp)
    legs_km = segment_lengths(wp, earth)
    n_legs = len(legs_km)
    speeds = spec.speed_knots * (1.0 + spec.speed_jitter * rng.standard_normal(n_legs))
    speeds = np.maximum(speeds, 0.2 * spec.speed_knots)
    stop_hours = dict(spec.stops)

    # timeline of (start_s, end_s, leg or -1 for a stop at waypoint)
    timeline = []
    t = 0.0
    for i in range(n_legs):
        dur = legs_km[i] / (speeds[i] * KNOT_KMH) * 3600.0
        timeline.append((t, t + dur, i, None))
        t += dur
        if i + 1 in stop_hours and stop_hours[i + 1] > 0:
            timeline.append((t, t + stop_hours[i + 1] * 3600.0, -1, i + 1))
            t += stop_hours[i + 1] * 3600.0
    total_s = t
    step = max(1, int(round(spec.report_interval_minutes * 60)))
    arrival_s = int(round(total_s))
    sample_s = list(range(0, arrival_s, step)) + [arrival_s]

    dep_epoch = departure.timestamp()
    reports = []
    seg = 0
    for ts in sample_s:
        while seg < len(timeline) - 1 and ts > timeline[seg][1]:
            seg += 1
        t0, t1, leg, at = timeline[seg]
        if ts == 0 or ts == arrival_s:
            pos = wp[0] if ts == 0 else wp[-1]
            sog = speeds[0] if ts == 0 else speeds[-1]
        elif leg < 0:
            pos = wp[at]
            sog = rng.uniform(0.0, STOP_SOG_MAX)
        else:
            a, b = units[leg], units[leg + 1]
            omega = math.atan2(np.linalg.norm(np.cross(a, b)), float(a @ b))
            f = min(max((ts - t0) / (t1 - t0), 0.0), 1.0)
            u = (math.sin((1 - f) * omega) * a + math.sin(f * omega) * b) / math.sin(omega)
            if spec.cross_track_sigma_km > 0:
                normal = np.cross(a, b)
                normal /= np.linalg.norm(normal)
                u = _offset(u[None, :], normal, np.array([rng.normal(0.0, spec.cross_track_sigma_km)]), earth)[0]
            pos = from_unit_vectors(u)[0]
            sog = speeds[leg]
        lat, lon = _quantize_deg(np.asarray(pos, dtype=float))
        reports.append(PositionReport(vessel_id, departure + timedelta(seconds=ts),
                                      GeoPoint(float(lat), float(lon)), round(float(sog), 3)))

    stops = tuple((dep_epoch + s0, dep_epoch + s1) for s0, s1, leg, _ in timeline if leg < 0)
    # on the report clock: the arrival report is stamped at a whole second
    stopped_s = sum(s1 - s0 for s0, s1, leg, _ in timeline if leg < 0)
    sailing_days = float(arrival_s - stopped_s) / 86400.0
    return VoyageTruth(vessel_id, voyage, departure, departure + timedelta(seconds=arrival_s), sailing_days,
                       float(legs_km.sum()), wp, stops, tuple(reports))


def generate_voyages(spec: RouteSpec, n_vessels: int, seed: int, *, voyages_per_vessel: int = 1,
                     start: datetime = DEFAULT_START, departure_spread_hours: float = 240.0,
                     turnaround_hours: float = 24.0, vessel_prefix: str = "V",
                     earth: EarthModel = DEFAULT_EARTH) -> SyntheticFleet:
    """Simulate ``n_vessels`` vessels sailing the route.

    A vessel's successive voyages alternate direction (out, back, out, ...),
    separated by ``turnaround_hours`` in port with no reports.
    """
    if n_vessels < 1 or voyages_per_vessel < 1:
        raise ValueError("need at least one vessel and one voyage")
    width = max(3, len(str(n_vessels)))
    reports, truth = [], []
    for i in range(n_vessels):
        rng = vessel_rng(seed, i)
        vessel_id = f"{vessel_prefix}{i:0{width}d}"
        departure = start + timedelta(seconds=int(rng.uniform(0.0, departure_spread_hours * 3600.0)))
        for v in range(voyages_per_vessel):
            leg_spec = spec if v % 2 == 0 else spec.reversed()
            voyage = _voyage(leg_spec, rng, vessel_id, v, departure, earth)
            truth.append(voyage)
            reports.extend(voyage.reports)
            departure = voyage.arrival + timedelta(hours=turnaround_hours)
    return SyntheticFleet(reports, truth)


def write_truth(truth: Sequence[VoyageTruth], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["vessel_id", "true_ata_days", "true_distance_km"])
        for t in truth:
            w.writerow([t.vessel_id, repr(t.true_ata_days), repr(t.true_distance_km)])


def read_truth(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as f:
        return [{"vessel_id": r["vessel_id"], "true_ata_days": float(r["true_ata_days"]),
                 "true_distance_km": float(r["true_distance_km"])} for r in csv.DictReader(f)]


# --- demo corridor ---------------------------------------------------------

DEMO_PORTS = {
    "SGP": (1.2644, 103.8400),
    "PER": (-32.0500, 115.7400),
    "ADL": (-34.7800, 138.4800),
}


def demo_ports(radius_km: float = 25.0) -> list[PortGeofence]:
    return [PortGeofence(name, GeoPoint.from_degrees(lat, lon), radius_km) for name, (lat, lon) in DEMO_PORTS.items()]


def demo_route(speed_knots: float = 14.0, speed_jitter: float = 0.05, cross_track_sigma_km: float = 5.0,
               report_interval_minutes: float = 30.0, stop_hours: float = 18.0) -> RouteSpec:
    """Singapore to Adelaide with a call at Perth."""
    wps = tuple(GeoPoint.from_degrees(*DEMO_PORTS[p]) for p in ("SGP", "PER", "ADL"))
    stops = ((1, stop_hours),) if stop_hours > 0 else ()
    return RouteSpec(wps, speed_knots, speed_jitter, cross_track_sigma_km, report_interval_minutes, stops)
