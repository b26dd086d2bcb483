"""Trajectory construction by density scanning."""
from .density import density_mode, silverman_bandwidth
from .kalman import KalmanParams, kalman_smooth, smooth_coords
from .ordering import nearest_neighbor_chain, order_by_smoothness, order_indices
from .scan import (HistoricalSet, ScanError, ScanMethod, ScanParams, lat_scan, lat_scan_coords, latlon_scan,
                   latlon_scan_coords, lon_scan, lon_scan_coords, scan_coords)
from .trajectory import (ConstructionError, Trajectory, build_trajectory, from_geojson, read_trajectory,
                         to_geojson, trajectory_stem, write_trajectory)

__all__ = [
    "ConstructionError", "HistoricalSet", "KalmanParams", "ScanError", "ScanMethod", "ScanParams", "Trajectory",
    "build_trajectory", "density_mode", "from_geojson", "kalman_smooth", "lat_scan", "lat_scan_coords",
    "latlon_scan", "latlon_scan_coords", "lon_scan", "lon_scan_coords", "nearest_neighbor_chain",
    "order_by_smoothness", "order_indices", "read_trajectory", "scan_coords", "silverman_bandwidth",
    "smooth_coords", "to_geojson", "trajectory_stem", "write_trajectory",
]
