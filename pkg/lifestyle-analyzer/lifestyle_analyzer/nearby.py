# -*- coding: utf-8 -*-

"""Point-of-interest resolver backed by an HTTP nearby-search service."""

import logging
import threading
from typing import Any, Dict, List, Optional

import requests

from lifestyle_analyzer.__version__ import __version__
from lifestyle_analyzer.base import BasePoiResolver
from lifestyle_analyzer.geo import LatLon, haversine

LOGGER = logging.getLogger(__name__)


class NearbySearchResolver(BasePoiResolver):
    """Resolve locations with ``GET /nearby?lat=&lon=&radius=``.

    The service answers ``{"results": [{"name", "tag", "lat", "lon"}]}``. The
    closest result within the radius wins; results without coordinates keep
    the service's order. Requests are issued one at a time per instance.
    """

    logger = logging.getLogger(__name__ + ".NearbySearchResolver")

    def __init__(
        self: "NearbySearchResolver",
        base_url: str,
        *,
        registered_home: Optional[LatLon] = None,
        registered_work: Optional[LatLon] = None,
        timeout: float = 10.0,
        session: Optional[requests.Session] = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._registered_home = registered_home
        self._registered_work = registered_work
        self._lock = threading.Lock()
        self.session = session or requests.Session()
        self.session.headers.update({"User-Agent": f"lifestyle-analyzer/{__version__}"})

    @property
    def registered_home(self: "NearbySearchResolver") -> Optional[LatLon]:
        return self._registered_home

    @property
    def registered_work(self: "NearbySearchResolver") -> Optional[LatLon]:
        return self._registered_work

    def search(
        self: "NearbySearchResolver",
        point: LatLon,
        radius: float,
    ) -> List[Dict[str, Any]]:
        """raw results of one nearby query"""

        params = {"lat": point[0], "lon": point[1], "radius": radius}
        with self._lock:
            self.logger.debug("querying <%s/nearby> with %r", self.base_url, params)
            response = self.session.get(
                f"{self.base_url}/nearby", params=params, timeout=self.timeout
            )
        response.raise_for_status()
        results = response.json().get("results") or []
        return [r for r in results if isinstance(r, dict) and r.get("tag")]

    def nearest(
        self: "NearbySearchResolver",
        point: LatLon,
        radius: float,
    ) -> Optional[str]:
        try:
            results = self.search(point, radius)
        except (requests.RequestException, ValueError) as exc:
            self.logger.warning(
                "nearby search for %r failed, treating it as unknown: %s", point, exc
            )
            return None

        best_tag = None
        best_distance = float("inf")
        for result in results:
            try:
                distance = haversine(point, (float(result["lat"]), float(result["lon"])))
            except (KeyError, TypeError, ValueError):
                # no usable coordinates: trust the service's ranking
                distance = radius
            if distance <= radius and distance < best_distance:
                best_tag = str(result["tag"])
                best_distance = distance

        return best_tag
