"""ETA from current position and speed against a constructed trajectory."""
from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime

import numpy as np

from .construct.trajectory import Trajectory
from .geo import DEFAULT_EARTH, EarthModel, GeoPoint, distances_from

KM_PER_NAUTICAL_MILE = 1.852
DEFAULT_MIN_SPEED_KNOTS = 0.5
# relative slack for treating two distances as a tie
TIE_RTOL = 1e-12


class SpeedBelowThreshold(ValueError):
    pass


@dataclass(frozen=True)
class VesselState:
    position: GeoPoint
    sog: float  # knots
    timestamp: datetime | None = None

    def __post_init__(self):
        if not self.sog >= 0:
            raise ValueError("speed over ground must be non-negative")


@dataclass(frozen=True)
class EtaPrediction:
    eta_days: float
    remaining_km: float
    next_index: int
    offtrack_km: float

    def as_dict(self) -> dict:
        return {"eta_days": self.eta_days, "remaining_km": self.remaining_km,
                "next_index": self.next_index, "offtrack_km": self.offtrack_km}


def knots_to_km_per_day(knots: float) -> float:
    return knots * KM_PER_NAUTICAL_MILE * 24.0


def _nearest(position: GeoPoint, L: Trajectory, earth: EarthModel) -> tuple[int, float]:
    d = distances_from(position, L.coords, earth)
    best = d.min()
    k = int(np.flatnonzero(d <= best * (1 + TIE_RTOL))[-1])
    return k, float(d[k])


def locate_next_index(position: GeoPoint, L: Trajectory, earth: EarthModel | None = None) -> int:
    """Index of the trajectory point closest to ``position``; ties go forward."""
    return _nearest(position, L, earth or L.earth)[0]


def remaining_distance(position: GeoPoint, L: Trajectory, earth: EarthModel | None = None) -> float:
    """Distance to the next trajectory point plus the trajectory length beyond it."""
    k, offtrack = _nearest(position, L, earth or L.earth)
    return offtrack + float(L.cumulative_km[-1] - L.cumulative_km[k])


def predict_eta(state: VesselState, L: Trajectory, earth: EarthModel | None = None,
                min_speed_knots: float = DEFAULT_MIN_SPEED_KNOTS) -> EtaPrediction:
    if state.sog < min_speed_knots:
        raise SpeedBelowThreshold("speed below threshold, ETA undefined")
    k, offtrack = _nearest(state.position, L, earth or L.earth)
    remaining = offtrack + float(L.cumulative_km[-1] - L.cumulative_km[k])
    return EtaPrediction(remaining / knots_to_km_per_day(state.sog), remaining, k, offtrack)
