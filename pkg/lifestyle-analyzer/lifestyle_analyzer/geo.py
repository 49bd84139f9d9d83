"""Great-circle distances on a spherical Earth."""

from typing import Tuple

import numpy as np

EARTH_RADIUS_M = 6_371_000.0

LatLon = Tuple[float, float]


def haversine_pairs(lats1, lons1, lats2, lons2) -> np.ndarray:
    """element-wise distances in meters between two arrays of (lat, lon)"""

    lat1 = np.radians(np.asarray(lats1, dtype=float))
    lon1 = np.radians(np.asarray(lons1, dtype=float))
    lat2 = np.radians(np.asarray(lats2, dtype=float))
    lon2 = np.radians(np.asarray(lons2, dtype=float))

    hav = (
        np.sin((lat2 - lat1) / 2) ** 2
        + np.cos(lat1) * np.cos(lat2) * np.sin((lon2 - lon1) / 2) ** 2
    )
    return 2 * EARTH_RADIUS_M * np.arcsin(np.sqrt(np.clip(hav, 0, 1)))


def haversine_many(point: LatLon, lats, lons) -> np.ndarray:
    """distances in meters from ``point`` to every (lat, lon) pair"""
    return haversine_pairs(point[0], point[1], lats, lons)


def haversine(p: LatLon, q: LatLon) -> float:
    """great-circle distance in meters between two (lat, lon) points"""
    return float(haversine_many(p, [q[0]], [q[1]])[0])
