"""End-to-end glue: journeys for an OD pair, construction, and ETA evaluation."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .construct import ConstructionError, HistoricalSet, KalmanParams, ScanParams, Trajectory, build_trajectory
from .eta import DEFAULT_MIN_SPEED_KNOTS, VesselState, predict_eta
from .geo import DEFAULT_EARTH, EarthModel
from .ingest import (DEFAULT_MAX_REPORT_GAP_HOURS, IngestError, Journey, PortGeofence, PositionReport,
                     StopPolicy, query_index, remove_stop_gaps, segment_journeys)
from .metrics import EvalPair

log = logging.getLogger(__name__)


def od_label(origin: str, destination: str) -> str:
    return f"{origin}-{destination}"


def prepare_journeys(reports: Iterable[PositionReport], origin: PortGeofence, destination: PortGeofence,
                     stop_policy: StopPolicy = StopPolicy(),
                     max_report_gap_hours: float = DEFAULT_MAX_REPORT_GAP_HOURS,
                     earth: EarthModel = DEFAULT_EARTH) -> list[Journey]:
    """Segment journeys for one OD pair and strip their stop gaps."""
    journeys = []
    for j in segment_journeys(reports, origin, destination, max_report_gap_hours, earth):
        try:
            journeys.append(remove_stop_gaps(j, stop_policy))
        except IngestError as exc:
            log.warning("dropping %s journey: %s", j.vessel_id, exc)
    return journeys


def construct_from_journeys(journeys: Sequence[Journey], scan: ScanParams, kalman: KalmanParams,
                            origin: PortGeofence, destination: PortGeofence,
                            earth: EarthModel = DEFAULT_EARTH) -> Trajectory:
    if not journeys:
        raise ConstructionError(f"no journeys between geofences {origin.name!r} and {destination.name!r}")
    return build_trajectory(HistoricalSet.from_journeys(journeys), scan, kalman, origin, destination, earth)


def sample_query_indices(journey: Journey, rng: np.random.Generator, n: int,
                         min_speed_knots: float = DEFAULT_MIN_SPEED_KNOTS) -> list[int]:
    """Pick ``n`` query reports at times drawn uniformly over the sailing time.

    Each drawn instant maps to the latest report at or before it that is
    moving at least ``min_speed_knots``; stop intervals are skipped.
    """
    sailing_s = journey.total_duration_days * 86400.0
    out = []
    for u in rng.uniform(0.0, sailing_s, size=n):
        t = journey.departure + float(u)
        for start, end in journey.excluded:
            if t >= start:
                t += end - start
        i = query_index(journey, t, min_speed_knots)
        if i is None or i == len(journey.reports) - 1:
            moving = [k for k, r in enumerate(journey.reports[:-1]) if r.sog >= min_speed_knots]
            if not moving:
                continue
            i = moving[0] if i is None else moving[-1]
        out.append(i)
    return out


@dataclass(frozen=True)
class QueryResult:
    label: str
    vessel_id: str
    journey_index: int
    epoch: float
    ata_days: float
    eta_days: float
    remaining_km: float

    def pair(self) -> EvalPair:
        return EvalPair(self.ata_days, self.eta_days, self.label)


def _journey_queries(j: int, journeys: Sequence[Journey], scan: ScanParams, kalman: KalmanParams,
                     origin: PortGeofence, destination: PortGeofence, label: str, seed: int, n_queries: int,
                     min_speed_knots: float, earth: EarthModel,
                     trajectory: Trajectory | None) -> list[QueryResult]:
    journey = journeys[j]
    if trajectory is None:
        pool = [x for i, x in enumerate(journeys) if i != j]
        trajectory = construct_from_journeys(pool, scan, kalman, origin, destination, earth)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, j])))
    results = []
    for i in sample_query_indices(journey, rng, n_queries, min_speed_knots):
        r = journey.reports[i]
        pred = predict_eta(VesselState(r.position, r.sog, r.timestamp), trajectory, earth, min_speed_knots)
        results.append(QueryResult(label, journey.vessel_id, j, r.epoch, journey.remaining_days(r.epoch),
                                   pred.eta_days, pred.remaining_km))
    return results


def evaluate_od(journeys: Sequence[Journey], scan: ScanParams, kalman: KalmanParams,
                origin: PortGeofence, destination: PortGeofence, *, seed: int = 0, n_queries: int = 10,
                min_speed_knots: float = DEFAULT_MIN_SPEED_KNOTS, earth: EarthModel = DEFAULT_EARTH,
                trajectory: Trajectory | None = None, jobs: int = 1) -> list[QueryResult]:
    """Leave-one-journey-out ETA evaluation for one OD pair.

    Each journey is queried against a trajectory built from all the other
    journeys, unless a fixed ``trajectory`` is supplied. Results come back in
    journey order whatever ``jobs`` is.
    """
    if trajectory is None and len(journeys) < 2:
        raise ConstructionError(f"leave-one-out evaluation needs at least two journeys, got {len(journeys)}")
    label = od_label(origin.name, destination.name)
    args = (journeys, scan, kalman, origin, destination, label, seed, n_queries, min_speed_knots, earth,
            trajectory)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            chunks = list(ex.map(lambda j: _journey_queries(j, *args), range(len(journeys))))
    else:
        chunks = [_journey_queries(j, *args) for j in range(len(journeys))]
    return [q for chunk in chunks for q in chunk]
