"""Abstract base point-of-interest resolver class."""

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Optional

from lifestyle_analyzer.core import HOME_TAG, UNKNOWN_TAG, WORK_TAG
from lifestyle_analyzer.geo import LatLon, haversine

if TYPE_CHECKING:
    from lifestyle_analyzer.ingest import StayPointParams


class BasePoiResolver(ABC):
    """Abstract resolver turning a location into a tag.

    Registered home and work locations take priority over any point of
    interest, so a pizza shop someone works at counts as work.
    """

    @property
    @abstractmethod
    def registered_home(self: "BasePoiResolver") -> Optional[LatLon]:
        """Location registered as home."""

    @property
    @abstractmethod
    def registered_work(self: "BasePoiResolver") -> Optional[LatLon]:
        """Location registered as work."""

    @property
    def is_registered(self: "BasePoiResolver") -> bool:
        """Both home and work are known."""
        return self.registered_home is not None and self.registered_work is not None

    @abstractmethod
    def nearest(
        self: "BasePoiResolver",
        point: LatLon,
        radius: float,
    ) -> Optional[str]:
        """Tag of the nearest point of interest within ``radius`` meters."""

    def resolve(
        self: "BasePoiResolver",
        point: LatLon,
        params: "StayPointParams",
    ) -> str:
        """Home, then work, then the nearest point of interest, else unknown."""

        home = self.registered_home
        if home is not None and haversine(point, home) <= params.home_work_radius:
            return HOME_TAG

        work = self.registered_work
        if work is not None and haversine(point, work) <= params.home_work_radius:
            return WORK_TAG

        return self.nearest(point, params.poi_radius) or UNKNOWN_TAG
