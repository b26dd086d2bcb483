"""Vessel route construction by density scanning, and ETA prediction."""
from .construct import (HistoricalSet, KalmanParams, ScanMethod, ScanParams, Trajectory, build_trajectory,
                        density_mode)
from .eta import EtaPrediction, VesselState, predict_eta, remaining_distance
from .geo import DEFAULT_EARTH, EarthModel, GeoPoint, central_angle, great_circle_distance
from .ingest import Journey, PortGeofence, PositionReport, StopPolicy, parse_reports, remove_stop_gaps, segment_journeys
from .metrics import EvalPair, MetricsReport, evaluate

__version__ = "0.1.0"
