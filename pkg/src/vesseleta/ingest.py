"""Position-report CSV I/O, journey segmentation and stop-gap removal."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from bisect import bisect_right
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from itertools import groupby
from typing import IO, Iterable, Iterator, Sequence

import numpy as np

from .geo import DEFAULT_EARTH, EarthModel, GeoPoint, as_array, distances_from

log = logging.getLogger(__name__)

REPORT_COLUMNS = ("vessel_id", "timestamp", "lat", "lon", "sog")
SECONDS_PER_DAY = 86400.0
DEFAULT_GEOFENCE_KM = 25.0
DEFAULT_MAX_REPORT_GAP_HOURS = 6.0


class IngestError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class PositionReport:
    vessel_id: str
    timestamp: datetime
    position: GeoPoint
    sog: float

    def __post_init__(self):
        if not self.sog >= 0:
            raise ValueError(f"negative speed over ground: {self.sog}")

    @property
    def epoch(self) -> float:
        return self.timestamp.timestamp()


@dataclass(frozen=True, slots=True)
class PortGeofence:
    name: str
    center: GeoPoint
    radius_km: float = DEFAULT_GEOFENCE_KM

    def __post_init__(self):
        if not self.radius_km > 0:
            raise ValueError(f"geofence {self.name!r}: radius must be positive")

    def contains(self, p: GeoPoint, earth: EarthModel = DEFAULT_EARTH) -> bool:
        return float(distances_from(self.center, [p], earth)[0]) <= self.radius_km


@dataclass(frozen=True, slots=True)
class StopPolicy:
    max_speed_knots: float = 0.5
    min_duration_hours: float = 2.0

    def __post_init__(self):
        if self.max_speed_knots < 0 or not self.min_duration_hours > 0:
            raise ValueError("stop policy needs max_speed_knots >= 0 and min_duration_hours > 0")


@dataclass(frozen=True)
class Journey:
    """One vessel's transit between two ports.

    ``excluded`` holds the ``(start, end)`` epoch-second intervals removed as
    stops; ``total_duration_days`` is the elapsed time minus those intervals.
    """
    vessel_id: str
    origin: str
    destination: str
    reports: tuple[PositionReport, ...]
    excluded: tuple[tuple[float, float], ...] = field(default=())

    def __post_init__(self):
        if len(self.reports) < 2:
            raise IngestError("a journey needs at least two reports")
        times = [r.epoch for r in self.reports]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise IngestError("journey reports must be strictly increasing in time")
        if not self.total_duration_days > 0:
            raise IngestError("journey duration must be positive")

    @property
    def departure(self) -> float:
        return self.reports[0].epoch

    @property
    def arrival(self) -> float:
        return self.reports[-1].epoch

    @property
    def total_duration_days(self) -> float:
        return self.remaining_days(self.departure)

    def remaining_days(self, epoch: float) -> float:
        """Travelling time from ``epoch`` to arrival, stop intervals excluded."""
        stopped = sum(max(0.0, end - max(start, epoch)) for start, end in self.excluded)
        return (self.arrival - epoch - stopped) / SECONDS_PER_DAY

    def coords(self) -> np.ndarray:
        return as_array([r.position for r in self.reports])


# --- CSV -----------------------------------------------------------------

def parse_timestamp(text: str) -> datetime:
    text = text.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass
class ParseResult:
    reports: list[PositionReport]
    skipped: int = 0

    @property
    def rows(self) -> int:
        return len(self.reports) + self.skipped


@contextmanager
def _text_stream(source) -> Iterator[IO[str]]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="", encoding="utf-8") as f:
            yield f
    elif isinstance(source, (bytes, bytearray)):
        yield io.StringIO(bytes(source).decode("utf-8"), newline="")
    elif isinstance(source, io.TextIOBase):
        yield source
    else:
        wrapper = io.TextIOWrapper(source, encoding="utf-8", newline="")
        try:
            yield wrapper
        finally:
            wrapper.detach()


def _parse_row(row: dict[str, str]) -> PositionReport:
    lat, lon = float(row["lat"]), float(row["lon"])
    if not (math.isfinite(lat) and math.isfinite(lon)):
        raise ValueError("non-finite coordinate")
    if lon == 180.0:
        lon = -180.0
    vessel = row["vessel_id"].strip()
    if not vessel:
        raise ValueError("empty vessel id")
    return PositionReport(vessel, parse_timestamp(row["timestamp"]),
                          GeoPoint.from_degrees(lat, lon), float(row["sog"]))


def read_reports(source) -> ParseResult:
    """Parse a report CSV; bad rows are counted, not fatal, unless they dominate."""
    with _text_stream(source) as stream:
        reader = csv.DictReader(stream)
        header = [h.strip() for h in (reader.fieldnames or [])]
        for col in REPORT_COLUMNS:
            if col not in header:
                raise IngestError(f"report file is missing required column {col!r}")
        reader.fieldnames = header
        result = ParseResult([])
        for row in reader:
            try:
                result.reports.append(_parse_row(row))
            except (TypeError, ValueError, KeyError):
                result.skipped += 1
    if result.skipped:
        log.warning("skipped %d of %d report rows", result.skipped, result.rows)
    if result.rows and result.skipped > 0.5 * result.rows:
        raise IngestError(f"{result.skipped} of {result.rows} rows unparseable; wrong file?")
    return result


def parse_reports(source) -> list[PositionReport]:
    return read_reports(source).reports


def write_reports(reports: Iterable[PositionReport], sink) -> None:
    """Emit reports in the ingest CSV format (7-decimal degrees, seconds)."""
    own = isinstance(sink, (str, os.PathLike))
    stream = open(sink, "w", newline="", encoding="utf-8") if own else sink
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for r in reports:
            writer.writerow([r.vessel_id, format_timestamp(r.timestamp),
                             f"{r.position.lat_deg:.7f}", f"{r.position.lon_deg:.7f}",
                             f"{r.sog:.3f}"])
    finally:
        if own:
            stream.close()


def load_ports(path) -> dict[str, PortGeofence]:
    """Read port geofences from JSON: ``[{"name", "lat", "lon", "radius_km"?}, ...]``."""
    with open(path, encoding="utf-8") as f:
        records = json.load(f)
    if isinstance(records, dict):
        records = records.get("ports", records)
    ports = {}
    for rec in records:
        port = PortGeofence(rec["name"], GeoPoint.from_degrees(rec["lat"], rec["lon"]),
                            float(rec.get("radius_km", DEFAULT_GEOFENCE_KM)))
        ports[port.name] = port
    return ports


def save_ports(ports: Iterable[PortGeofence], path) -> None:
    records = [{"name": p.name, "lat": round(p.center.lat_deg, 7), "lon": round(p.center.lon_deg, 7),
                "radius_km": p.radius_km} for p in ports]
    with open(path, "w", encoding="utf-8") as f:
        json.dump(records, f, indent=2)
        f.write("\n")


# --- segmentation --------------------------------------------------------

def _crosses_antimeridian(reports: Sequence[PositionReport]) -> bool:
    lons = np.array([r.position.lon for r in reports])
    return bool(np.any(np.abs(np.diff(lons)) > math.pi))


def _vessel_journeys(reports: list[PositionReport], origin: PortGeofence, destination: PortGeofence,
                     max_gap_s: float, earth: EarthModel) -> list[Journey]:
    coords = as_array([r.position for r in reports])
    in_origin = distances_from(origin.center, coords, earth) <= origin.radius_km
    in_dest = distances_from(destination.center, coords, earth) <= destination.radius_km
    journeys = []
    start = None
    for i in range(len(reports)):
        if in_origin[i]:
            start = i
        elif in_dest[i] and start is not None:
            span = reports[start:i + 1]
            start = None
            times = np.array([r.epoch for r in span])
            if np.any(np.diff(times) > max_gap_s):
                log.info("dropping %s journey at %s: report gap over limit",
                         span[0].vessel_id, format_timestamp(span[0].timestamp))
                continue
            if _crosses_antimeridian(span):
                log.warning("dropping %s journey at %s: crosses the antimeridian",
                            span[0].vessel_id, format_timestamp(span[0].timestamp))
                continue
            journeys.append(Journey(span[0].vessel_id, origin.name, destination.name, tuple(span)))
    return journeys


def segment_journeys(reports: Iterable[PositionReport], origin: PortGeofence, destination: PortGeofence,
                     max_report_gap_hours: float = DEFAULT_MAX_REPORT_GAP_HOURS,
                     earth: EarthModel = DEFAULT_EARTH) -> list[Journey]:
    """Cut each vessel's track into origin-to-destination journeys.

    A journey runs from the last report inside the origin geofence to the
    first report inside the destination geofence. Journeys with a reporting
    gap over the limit, or that cross the antimeridian, are dropped.
    Output is ordered by vessel id, then departure time.
    """
    by_vessel = sorted(reports, key=lambda r: (r.vessel_id, r.epoch))
    journeys = []
    for _, group in groupby(by_vessel, key=lambda r: r.vessel_id):
        track = []
        for r in group:
            # duplicate timestamps: keep the first report seen
            if not track or r.epoch > track[-1].epoch:
                track.append(r)
        journeys.extend(_vessel_journeys(track, origin, destination, max_report_gap_hours * 3600.0, earth))
    return journeys


# --- stops ---------------------------------------------------------------

def _merge_intervals(intervals: Iterable[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    merged: list[tuple[float, float]] = []
    for start, end in sorted(intervals):
        if merged and start <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(end, merged[-1][1]))
        else:
            merged.append((start, end))
    return tuple(merged)


def find_stop_runs(journey: Journey, policy: StopPolicy) -> list[tuple[int, int]]:
    """Index ranges ``(first, last)`` of maximal slow runs lasting long enough."""
    runs = []
    reports = journey.reports
    i = 0
    while i < len(reports):
        if reports[i].sog > policy.max_speed_knots:
            i += 1
            continue
        j = i
        while j + 1 < len(reports) and reports[j + 1].sog <= policy.max_speed_knots:
            j += 1
        if reports[j].epoch - reports[i].epoch >= policy.min_duration_hours * 3600.0:
            runs.append((i, j))
        i = j + 1
    return runs


def remove_stop_gaps(journey: Journey, policy: StopPolicy = StopPolicy()) -> Journey:
    """Drop the time spent stopped from a journey.

    Each qualifying slow run keeps only its first and last report, and its
    elapsed time is added to the journey's excluded intervals. Applying this
    twice gives the same journey as applying it once.
    """
    runs = find_stop_runs(journey, policy)
    if not runs:
        return journey
    keep = np.ones(len(journey.reports), dtype=bool)
    for first, last in runs:
        keep[first + 1:last] = False
    if keep.sum() < 2:
        raise IngestError("stop removal leaves a degenerate journey")
    reports = tuple(r for r, k in zip(journey.reports, keep) if k)
    intervals = [(journey.reports[a].epoch, journey.reports[b].epoch) for a, b in runs]
    return replace(journey, reports=reports, excluded=_merge_intervals([*journey.excluded, *intervals]))


def journey_from_reports(reports: Sequence[PositionReport], origin: str = "", destination: str = "") -> Journey:
    """Wrap an already-delimited report sequence as a journey."""
    ordered = sorted(reports, key=lambda r: r.epoch)
    return Journey(ordered[0].vessel_id, origin, destination, tuple(ordered))


def query_index(journey: Journey, epoch: float, min_speed_knots: float = 0.0) -> int | None:
    """Latest report at or before ``epoch`` moving at least ``min_speed_knots``."""
    times = [r.epoch for r in journey.reports]
    i = bisect_right(times, epoch) - 1
    while i >= 0 and journey.reports[i].sog < min_speed_knots:
        i -= 1
    return i if i >= 0 else None
