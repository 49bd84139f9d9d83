# -*- coding: utf-8 -*-

"""From raw GPS traces to day logs: stay points, POI resolution, home split."""

import logging
import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import pytz

from lifestyle_analyzer.base import BasePoiResolver
from lifestyle_analyzer.core import (
    CATEGORIES,
    HOME_TAG,
    TOLERANCE,
    TRAVEL_TAG,
    UNKNOWN_TAG,
    CategoryId,
    DayLog,
    HomeProfile,
    Visit,
    check_tag,
)
from lifestyle_analyzer.geo import (
    EARTH_RADIUS_M,
    LatLon,
    haversine,
    haversine_many,
    haversine_pairs,
)
from lifestyle_analyzer.utils import (
    PathLike,
    ValidationError,
    as_float,
    load_json,
    require_mapping,
)

LOGGER = logging.getLogger(__name__)

SECONDS_PER_HOUR = 3600.0
# distances are computed from the anchor in blocks of this many points
_BLOCK = 256

__all__ = (
    "EARTH_RADIUS_M",
    "GpsPoint",
    "Poi",
    "PoiDatabase",
    "StayPoint",
    "StayPointParams",
    "analysis_window",
    "detect_stay_points",
    "drop_outliers",
    "haversine",
    "haversine_many",
    "load_allocation",
    "load_poi_database",
    "load_trace",
    "resolve_poi",
    "trace_to_daylog",
    "trace_to_visits",
)


@dataclass(frozen=True)
class GpsPoint:
    """A timestamped position fix (UTC seconds, degrees)."""

    timestamp: float
    lat: float
    lon: float

    def __post_init__(self):
        lat, lon = float(self.lat), float(self.lon)
        if not -90 <= lat <= 90 or not -180 <= lon <= 180:
            raise ValidationError(
                f"coordinates ({lat}, {lon}) at <{self.timestamp}> out of range"
            )
        object.__setattr__(self, "timestamp", float(self.timestamp))
        object.__setattr__(self, "lat", lat)
        object.__setattr__(self, "lon", lon)

    @property
    def location(self: "GpsPoint") -> LatLon:
        """(lat, lon)"""
        return (self.lat, self.lon)


@dataclass(frozen=True)
class StayPoint:
    """A span of the trace spent within the distance threshold of one place."""

    centroid: LatLon
    arrival: float
    departure: float

    def __post_init__(self):
        if not self.departure > self.arrival:
            raise ValidationError(
                f"stay point departs at {self.departure} before arriving at {self.arrival}"
            )

    @property
    def duration(self: "StayPoint") -> float:
        """hours between arrival and departure"""
        return (self.departure - self.arrival) / SECONDS_PER_HOUR


@dataclass(frozen=True)
class StayPointParams:
    """Thresholds for segmentation and resolution.

    Distances in meters, durations in minutes, ``day_boundary_hour`` as local
    hour in ``timezone``.
    """

    distance_threshold: float = 200.0
    min_dwell: float = 20.0
    poi_radius: float = 75.0
    home_work_radius: float = 50.0
    day_boundary_hour: int = 4
    timezone: str = "UTC"
    travel_gap: float = 5.0
    max_speed: float = 70.0

    def __post_init__(self):
        violations = [
            f"{name} must be strictly positive, got {getattr(self, name)}"
            for name in (
                "distance_threshold",
                "min_dwell",
                "poi_radius",
                "home_work_radius",
                "travel_gap",
                "max_speed",
            )
            if not getattr(self, name) > 0
        ]
        if self.home_work_radius > self.poi_radius:
            violations.append(
                f"home/work radius {self.home_work_radius} m exceeds the POI radius "
                f"{self.poi_radius} m"
            )
        if not 0 <= self.day_boundary_hour < 24:
            violations.append(f"day boundary hour {self.day_boundary_hour} not in [0, 24)")
        try:
            pytz.timezone(self.timezone)
        except pytz.UnknownTimeZoneError:
            violations.append(f"unknown timezone <{self.timezone}>")
        if violations:
            raise ValidationError("invalid stay point parameters", violations)

    @property
    def tzinfo(self: "StayPointParams"):
        """pytz timezone of the analysis day"""
        return pytz.timezone(self.timezone)


@dataclass(frozen=True)
class Poi:
    """A named, tagged location."""

    name: str
    lat: float
    lon: float
    tag: str

    def __post_init__(self):
        object.__setattr__(self, "tag", check_tag(self.tag))


class PoiDatabase(BasePoiResolver):
    """Offline point-of-interest database with registered home and work."""

    def __init__(
        self: "PoiDatabase",
        entries: Iterable[Poi] = (),
        *,
        registered_home: Optional[LatLon] = None,
        registered_work: Optional[LatLon] = None,
    ):
        self.entries: Tuple[Poi, ...] = tuple(entries)
        self._registered_home = _location(registered_home, "home")
        self._registered_work = _location(registered_work, "work")
        self._lats = np.array([poi.lat for poi in self.entries], dtype=float)
        self._lons = np.array([poi.lon for poi in self.entries], dtype=float)
        LOGGER.debug("POI database with %d entries", len(self.entries))

    @property
    def registered_home(self: "PoiDatabase") -> Optional[LatLon]:
        return self._registered_home

    @property
    def registered_work(self: "PoiDatabase") -> Optional[LatLon]:
        return self._registered_work

    def nearest(self: "PoiDatabase", point: LatLon, radius: float) -> Optional[str]:
        if not self.entries:
            return None
        distances = haversine_many(point, self._lats, self._lons)
        distances = np.where(distances <= radius, distances, np.inf)
        # argmin picks the first entry among equally near ones
        index = int(np.argmin(distances))
        return self.entries[index].tag if np.isfinite(distances[index]) else None

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PoiDatabase":
        """parse ``{"home": [lat, lon], "work": [lat, lon], "pois": [...]}``"""
        data = require_mapping(data, "POI database")
        entries = []
        for item in data.get("pois") or ():
            item = require_mapping(item, "POI")
            name = str(item.get("name", ""))
            entries.append(
                Poi(
                    name=name,
                    lat=as_float(item.get("lat"), f"latitude of <{name}>"),
                    lon=as_float(item.get("lon"), f"longitude of <{name}>"),
                    tag=item.get("tag"),
                )
            )
        return cls(
            entries,
            registered_home=data.get("home"),
            registered_work=data.get("work"),
        )

    def __len__(self):
        return len(self.entries)


def _location(value: Any, what: str) -> Optional[LatLon]:
    if value is None:
        return None
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ValidationError(f"{what} location must be [lat, lon], got <{value!r}>")
    point = GpsPoint(
        timestamp=0,
        lat=as_float(value[0], f"{what} latitude"),
        lon=as_float(value[1], f"{what} longitude"),
    )
    return point.location


def load_poi_database(path: PathLike) -> PoiDatabase:
    """read a POI database file"""
    LOGGER.info("loading POI database from <%s>", path)
    return PoiDatabase.from_dict(load_json(path))


def resolve_poi(db: BasePoiResolver, point: LatLon, params: StayPointParams) -> str:
    """tag of a location: home, work, nearest POI within radius or unknown"""
    return db.resolve(point, params)


def check_trace(trace: Sequence[GpsPoint]) -> None:
    """timestamps must be strictly increasing"""
    for prev, point in zip(trace, trace[1:]):
        if not point.timestamp > prev.timestamp:
            raise ValidationError(
                f"trace is not ordered: <{point.timestamp}> follows <{prev.timestamp}>"
            )


def drop_outliers(trace: Sequence[GpsPoint], max_speed: float = 70.0) -> List[GpsPoint]:
    """remove fixes implying a speed above ``max_speed`` m/s towards both neighbours

    An end point has a single neighbour; it is dropped only if that neighbour is
    itself consistent with the fix after it. Two fixes alone are both kept.
    """

    trace = list(trace)
    num = len(trace)
    if num < 3:
        return trace

    lats = np.array([p.lat for p in trace], dtype=float)
    lons = np.array([p.lon for p in trace], dtype=float)
    times = np.array([p.timestamp for p in trace], dtype=float)

    # fast[k]: the jump from fix k to fix k + 1 is impossible
    fast = haversine_pairs(lats[:-1], lons[:-1], lats[1:], lons[1:]) > max_speed * (
        times[1:] - times[:-1]
    )

    drop = np.zeros(num, dtype=bool)
    drop[1:-1] = fast[:-1] & fast[1:]
    drop[0] = fast[0] and not fast[1]
    drop[-1] = fast[-1] and not fast[-2]

    kept = [point for point, bad in zip(trace, drop) if not bad]

    if len(kept) < num:
        LOGGER.warning(
            "dropped %d GPS outliers faster than %g m/s", len(trace) - len(kept), max_speed
        )
    return kept


def detect_stay_points(
    trace: Sequence[GpsPoint],
    params: Optional[StayPointParams] = None,
) -> List[StayPoint]:
    """split the trace into runs within the distance threshold of their first fix
    and keep the runs dwelling at least ``min_dwell`` minutes"""

    params = params or StayPointParams()
    trace = list(trace)
    check_trace(trace)

    num = len(trace)
    lats = np.array([p.lat for p in trace], dtype=float)
    lons = np.array([p.lon for p in trace], dtype=float)
    min_dwell = params.min_dwell * 60

    stays = []
    i = 0
    while i < num:
        anchor = trace[i].location
        j = i + 1
        while j < num:
            stop = min(j + _BLOCK, num)
            far = np.flatnonzero(
                haversine_many(anchor, lats[j:stop], lons[j:stop])
                > params.distance_threshold
            )
            if far.size:
                j += int(far[0])
                break
            j = stop

        last = j - 1
        span = trace[last].timestamp - trace[i].timestamp
        if last > i and span >= min_dwell:
            stays.append(
                StayPoint(
                    centroid=(float(lats[i:j].mean()), float(lons[i:j].mean())),
                    arrival=trace[i].timestamp,
                    departure=trace[last].timestamp,
                )
            )
        # runs are independent of min_dwell: the next one starts at the first
        # fix outside this one
        i = j

    LOGGER.info("detected %d stay points in %d GPS fixes", len(stays), num)
    return stays


def analysis_window(
    trace: Sequence[GpsPoint],
    params: Optional[StayPointParams] = None,
) -> Tuple[float, float]:
    """UTC bounds of the analysis day containing the first fix"""

    params = params or StayPointParams()
    if not trace:
        raise ValidationError("empty GPS trace")

    tz = params.tzinfo
    first = datetime.fromtimestamp(trace[0].timestamp, tz)
    day = first.replace(tzinfo=None).replace(
        hour=params.day_boundary_hour, minute=0, second=0, microsecond=0
    )
    if tz.localize(day) > first:
        day -= timedelta(days=1)

    return tz.localize(day).timestamp(), tz.localize(day + timedelta(days=1)).timestamp()


def trace_to_visits(
    trace: Sequence[GpsPoint],
    resolver: BasePoiResolver,
    params: Optional[StayPointParams] = None,
) -> List[Visit]:
    """tagged visits, home included, with travel gaps and same-tag runs merged"""

    params = params or StayPointParams()
    trace = list(trace)
    check_trace(trace)

    start, end = analysis_window(trace, params)
    in_day = [p for p in trace if start <= p.timestamp <= end]
    if len(in_day) < len(trace):
        LOGGER.warning(
            "ignoring %d GPS fixes outside the analysis day", len(trace) - len(in_day)
        )

    stays = detect_stay_points(drop_outliers(in_day, params.max_speed), params)

    visits: List[Visit] = []
    previous: Optional[StayPoint] = None
    for stay in stays:
        if previous is not None:
            gap = stay.arrival - previous.departure
            if gap > params.travel_gap * 60:
                visits.append(
                    Visit(
                        tag=TRAVEL_TAG,
                        duration=gap / SECONDS_PER_HOUR,
                        start=previous.departure,
                    )
                )
        tag = resolver.resolve(stay.centroid, params)
        if tag == UNKNOWN_TAG:
            LOGGER.info("no point of interest near %r, counting it as other", stay.centroid)
        visits.append(Visit(tag=tag, duration=stay.duration, start=stay.arrival))
        previous = stay

    merged: List[Visit] = []
    for visit in visits:
        if merged and merged[-1].tag == visit.tag:
            last = merged.pop()
            visit = Visit(
                tag=last.tag,
                duration=last.duration + visit.duration,
                start=last.start,
            )
        merged.append(visit)

    return merged


def _fractions(allocation_fractions: Optional[Mapping[Any, Any]]) -> Dict[CategoryId, float]:
    fractions = {cat: 0.0 for cat in CATEGORIES}
    for cat, value in (allocation_fractions or {}).items():
        fractions[CategoryId.parse(cat)] = as_float(value, f"home fraction of <{cat}>")

    violations = [
        f"home fraction of <{cat}> is negative ({value})"
        for cat, value in fractions.items()
        if value < 0
    ]
    total = math.fsum(fractions.values())
    if total > 1 + TOLERANCE:
        violations.append(f"home fractions add up to {total}, more than 1")
    if violations:
        raise ValidationError("invalid home allocation", violations)
    return fractions


def trace_to_daylog(
    trace: Sequence[GpsPoint],
    db: BasePoiResolver,
    params: Optional[StayPointParams] = None,
    allocation_fractions: Optional[Mapping[Any, float]] = None,
    home_weights: Optional[Mapping[Any, float]] = None,
    *,
    resolver: Optional[BasePoiResolver] = None,
) -> DayLog:
    """day log of one GPS trace; home time is split by the allocation fractions

    ``resolver`` replaces ``db`` for point-of-interest lookups (e.g. a nearby
    search service); the registration check always applies to ``db``.
    """

    if not db.is_registered:
        raise ValidationError("home and work locations must be registered before analysis")

    fractions = _fractions(allocation_fractions)
    visits = trace_to_visits(trace, resolver or db, params)

    home_time = math.fsum(v.duration for v in visits if v.tag == HOME_TAG)
    home = HomeProfile(
        total_home_time=home_time,
        allocations={cat: home_time * f for cat, f in fractions.items()},
        weights=home_weights or {},
    )
    visits = tuple(v for v in visits if v.tag != HOME_TAG)

    LOGGER.info(
        "day log with %d visits and %.2f h at home", len(visits), home.total_home_time
    )
    return DayLog(visits=visits, home=home)


def load_trace(path: PathLike) -> List[GpsPoint]:
    """read a ``timestamp,lat,lon`` CSV file"""

    LOGGER.info("loading GPS trace from <%s>", path)
    try:
        frame = pd.read_csv(path)
    except pd.errors.EmptyDataError:
        return []
    except pd.errors.ParserError as exc:
        raise ValidationError(f"<{path}> is not a valid CSV file: {exc}") from exc

    missing = {"timestamp", "lat", "lon"} - set(frame.columns)
    if missing:
        raise ValidationError(f"GPS trace <{path}> lacks columns {sorted(missing)}")

    try:
        frame = frame[["timestamp", "lat", "lon"]].astype(float)
    except ValueError as exc:
        raise ValidationError(f"non-numeric values in GPS trace <{path}>") from exc

    return [
        GpsPoint(timestamp=row.timestamp, lat=row.lat, lon=row.lon)
        for row in frame.itertuples(index=False)
    ]


def load_allocation(path: PathLike) -> Tuple[Dict[str, float], Dict[str, float]]:
    """home fractions and home weights from an allocation file

    The file is either a flat ``{category: fraction}`` map or
    ``{"fractions": {...}, "weights": {...}}``.
    """

    LOGGER.info("loading home allocation from <%s>", path)
    data = require_mapping(load_json(path), "home allocation")
    if "fractions" in data or "weights" in data:
        fractions = require_mapping(data.get("fractions", {}), "home fractions")
        weights = require_mapping(data.get("weights", {}), "home weights")
        return dict(fractions), dict(weights)
    return dict(data), {}
