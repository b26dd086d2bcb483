"""Greedy nearest-neighbour chaining of scan points from origin to destination."""
from __future__ import annotations

import numpy as np

from ..geo import GeoPoint, as_array, as_points, distances_from, pairwise_distances


def nearest_neighbor_chain(dist: np.ndarray, start: int) -> list[int]:
    """Visit every index, always stepping to the closest unvisited one.

    ``dist`` is a square distance matrix. Ties go to the lowest index.
    """
    n = len(dist)
    visited = np.zeros(n, dtype=bool)
    chain = [start]
    visited[start] = True
    current = start
    for _ in range(n - 1):
        row = np.where(visited, np.inf, dist[current])
        current = int(np.argmin(row))
        visited[current] = True
        chain.append(current)
    return chain


def order_indices(coords: np.ndarray, origin: GeoPoint, destination: GeoPoint) -> list[int]:
    coords = as_array(coords)
    if len(coords) < 2:
        raise ValueError("ordering needs at least two points")
    start = int(np.argmin(distances_from(origin, coords)))
    chain = nearest_neighbor_chain(pairwise_distances(coords), start)
    end = int(np.argmin(distances_from(destination, coords)))
    return chain[:chain.index(end) + 1]


def order_by_smoothness(points, origin: GeoPoint, destination: GeoPoint) -> list[GeoPoint]:
    """Order unordered scan points into a path from origin to destination.

    The chain starts at the point nearest the origin, greedily extends to
    the nearest unvisited point, and is cut after the point nearest the
    destination.
    """
    coords = as_array(points)
    return as_points(coords[order_indices(coords, origin, destination)])
