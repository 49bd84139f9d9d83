# -*- coding: utf-8 -*-

"""Tags, categories, visits and day logs; aggregation of time and score."""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import (
    Any,
    Dict,
    FrozenSet,
    Iterable,
    List,
    Mapping,
    Optional,
    Tuple,
)

from pytility import arg_to_iter

from lifestyle_analyzer.utils import (
    PathLike,
    ValidationError,
    as_float,
    load_json,
    require_mapping,
)

LOGGER = logging.getLogger(__name__)

HOME_TAG = "home"
WORK_TAG = "work"
UNKNOWN_TAG = "unknown"
TRAVEL_TAG = "travel"

WEIGHT_MIN = -100.0
WEIGHT_MAX = 100.0
DEFAULT_OTHER_WEIGHT = 10.0
TOLERANCE = 1e-9


class CategoryId(Enum):
    """The five lifestyle categories; ``other`` is the complement of the rest."""

    SOCIAL = "social"
    LEISURE = "leisure"
    HEALTH = "health"
    WORK = "work"
    OTHER = "other"

    @classmethod
    def parse(cls, value: Any) -> "CategoryId":
        """category from its name (``others`` is accepted for ``other``)"""
        if isinstance(value, cls):
            return value
        name = str(value).strip().lower()
        if name == "others":
            name = "other"
        try:
            return cls(name)
        except ValueError:
            raise ValidationError(f"unknown category <{value}>") from None

    def __str__(self):
        return self.value


CATEGORIES: Tuple[CategoryId, ...] = tuple(CategoryId)


class QuantityKind(Enum):
    """Which crisp quantity of a category: hours (K) or weighted score (M)."""

    TIME = "time"
    SCORE = "score"

    @classmethod
    def parse(cls, value: Any) -> "QuantityKind":
        """kind from its name"""
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValidationError(f"unknown quantity kind <{value}>") from None

    def __str__(self):
        return self.value


def check_tag(name: Any) -> str:
    """validate a tag name"""
    if not isinstance(name, str) or not name.strip():
        raise ValidationError(f"tag must be a non-empty string, got <{name!r}>")
    return name.strip()


def _per_category(
    values: Optional[Mapping[Any, Any]],
    what: str,
) -> Dict[CategoryId, float]:
    result = {cat: 0.0 for cat in CATEGORIES}
    for key, value in (values or {}).items():
        result[CategoryId.parse(key)] = as_float(value, f"{what} <{key}>")
    return result


def _frozen(mapping: Mapping) -> Mapping:
    return MappingProxyType(dict(mapping))


@dataclass(frozen=True)
class TagCatalog:
    """Per-tag intensity weights Z for every category the tag belongs to."""

    entries: Mapping[str, Mapping[CategoryId, float]] = field(default_factory=dict)
    default_other_weight: float = DEFAULT_OTHER_WEIGHT

    def __post_init__(self):
        entries = {
            check_tag(tag): _frozen(
                {CategoryId.parse(cat): float(w) for cat, w in weights.items()}
            )
            for tag, weights in self.entries.items()
        }
        object.__setattr__(self, "entries", _frozen(entries))
        object.__setattr__(self, "default_other_weight", float(self.default_other_weight))

    def __contains__(self, tag):
        return tag in self.entries

    def weight(self: "TagCatalog", tag: str, cat: CategoryId) -> float:
        """Z_cat(tag); unknown tags weigh ``default_other_weight`` in ``other``"""
        weights = self.entries.get(tag)
        if weights:
            return weights.get(cat, 0.0)
        return self.default_other_weight if cat is CategoryId.OTHER else 0.0

    def to_dict(self: "TagCatalog") -> Dict[str, Any]:
        """catalog file representation"""
        return {
            "tags": {
                tag: {str(cat): w for cat, w in weights.items()}
                for tag, weights in self.entries.items()
            },
            "default_other_weight": self.default_other_weight,
        }


@dataclass(frozen=True)
class Visit:
    """Time spent at one tagged location, in hours."""

    tag: str
    duration: float
    start: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "tag", check_tag(self.tag))
        duration = float(self.duration)
        if not duration >= 0:
            raise ValidationError(
                f"visit <{self.tag}> has negative duration <{self.duration}>"
            )
        object.__setattr__(self, "duration", duration)


@dataclass(frozen=True)
class HomeProfile:
    """Time at home (τ), its split across categories (τ_i) and home weights (ξ_i).

    Allocations are normalised on construction: when they add up to less than
    the total home time the remainder goes to leisure, since leisure includes
    rest. Allocations exceeding the total are rejected.
    """

    total_home_time: float = 0.0
    allocations: Mapping[CategoryId, float] = field(default_factory=dict)
    weights: Mapping[CategoryId, float] = field(default_factory=dict)

    def __post_init__(self):
        total = as_float(self.total_home_time, "total home time")
        allocations = _per_category(self.allocations, "home allocation")
        weights = _per_category(self.weights, "home weight")

        violations = []
        if total < 0:
            violations.append(f"total home time <{total}> is negative")
        violations.extend(
            f"home allocation <{cat}> is negative ({hours})"
            for cat, hours in allocations.items()
            if hours < 0
        )
        violations.extend(
            f"home weight <{cat}> = {w} outside [{WEIGHT_MIN:g}, {WEIGHT_MAX:g}]"
            for cat, w in weights.items()
            if not WEIGHT_MIN <= w <= WEIGHT_MAX
        )

        allocated = math.fsum(allocations.values())
        if allocated > total + TOLERANCE:
            violations.append(
                f"home allocations add up to {allocated} h, more than the "
                f"{total} h spent at home"
            )
        if violations:
            raise ValidationError("invalid home profile", violations)

        remainder = total - allocated
        if remainder > 0:
            LOGGER.debug("adding %.3f h of unallocated home time to leisure", remainder)
            allocations[CategoryId.LEISURE] += remainder

        object.__setattr__(self, "total_home_time", total)
        object.__setattr__(self, "allocations", _frozen(allocations))
        object.__setattr__(self, "weights", _frozen(weights))

    def to_dict(self: "HomeProfile") -> Dict[str, Any]:
        """day log file representation"""
        return {
            "total_hours": self.total_home_time,
            "allocations": {str(c): h for c, h in self.allocations.items()},
            "weights": {str(c): w for c, w in self.weights.items()},
        }


@dataclass(frozen=True)
class DayLog:
    """One analysis day: tagged visits (without home) plus the home profile."""

    visits: Tuple[Visit, ...] = ()
    home: HomeProfile = field(default_factory=HomeProfile)

    def __post_init__(self):
        visits = tuple(arg_to_iter(self.visits))
        if any(visit.tag == HOME_TAG for visit in visits):
            raise ValidationError(
                "home time belongs in the home profile, not in the visit list"
            )
        object.__setattr__(self, "visits", visits)


@dataclass(frozen=True)
class CategoryBreakdown:
    """Total hours K_i and weighted score M_i for every category."""

    times: Mapping[CategoryId, float] = field(default_factory=dict)
    scores: Mapping[CategoryId, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "times", _frozen(_per_category(self.times, "time")))
        object.__setattr__(
            self, "scores", _frozen(_per_category(self.scores, "score"))
        )

    def time(self: "CategoryBreakdown", cat: CategoryId) -> float:
        """K_cat"""
        return self.times[CategoryId.parse(cat)]

    def score(self: "CategoryBreakdown", cat: CategoryId) -> float:
        """M_cat"""
        return self.scores[CategoryId.parse(cat)]

    def crisp(self: "CategoryBreakdown", cat: CategoryId, kind: QuantityKind) -> float:
        """crisp input for a (category, kind) pair"""
        kind = QuantityKind.parse(kind)
        return self.time(cat) if kind is QuantityKind.TIME else self.score(cat)

    def __add__(self, other: "CategoryBreakdown") -> "CategoryBreakdown":
        if not isinstance(other, CategoryBreakdown):
            return NotImplemented
        return CategoryBreakdown(
            times={c: self.times[c] + other.times[c] for c in CATEGORIES},
            scores={c: self.scores[c] + other.scores[c] for c in CATEGORIES},
        )

    def scaled(self: "CategoryBreakdown", factor: float) -> "CategoryBreakdown":
        """every K_i and M_i multiplied by ``factor``"""
        return CategoryBreakdown(
            times={c: factor * v for c, v in self.times.items()},
            scores={c: factor * v for c, v in self.scores.items()},
        )

    def to_dict(self: "CategoryBreakdown") -> Dict[str, Dict[str, float]]:
        """``{category: {"time": K, "score": M}}``"""
        return {
            str(cat): {"time": self.times[cat], "score": self.scores[cat]}
            for cat in CATEGORIES
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CategoryBreakdown":
        """inverse of :meth:`to_dict`; missing categories count as zero"""
        data = require_mapping(data, "breakdown")
        times = {}
        scores = {}
        for cat, values in data.items():
            values = require_mapping(values, f"breakdown entry <{cat}>")
            times[cat] = values.get("time", 0)
            scores[cat] = values.get("score", 0)
        return cls(times=times, scores=scores)


def validate_catalog(catalog: TagCatalog) -> List[str]:
    """list every broken catalog rule; empty if the catalog is valid"""

    violations = []

    for tag, weights in catalog.entries.items():
        if tag == HOME_TAG:
            violations.append(
                f"tag <{tag}>: home is configured through the home profile, "
                "not the catalog"
            )
        for cat, weight in weights.items():
            if not WEIGHT_MIN <= weight <= WEIGHT_MAX:
                violations.append(
                    f"tag <{tag}>: weight {weight:g} for <{cat}> outside "
                    f"[{WEIGHT_MIN:g}, {WEIGHT_MAX:g}]"
                )
        if len(weights) >= 2 and all(w == 0 for w in weights.values()):
            violations.append(
                f"tag <{tag}>: belongs to {len(weights)} categories but all "
                "its weights are 0"
            )

    if not WEIGHT_MIN <= catalog.default_other_weight <= WEIGHT_MAX:
        violations.append(
            f"default other weight {catalog.default_other_weight:g} outside "
            f"[{WEIGHT_MIN:g}, {WEIGHT_MAX:g}]"
        )

    return violations


def categories_of(catalog: TagCatalog, tag: str) -> FrozenSet[CategoryId]:
    """categories a tag counts towards; untagged locations fall into ``other``"""

    if tag == HOME_TAG:
        raise ValidationError("the home tag is handled by the home profile")

    weights = catalog.entries.get(tag)
    if not weights:
        return frozenset((CategoryId.OTHER,))
    return frozenset(weights)


def category_time(log: DayLog, catalog: TagCatalog, cat: CategoryId) -> float:
    """K_cat: hours at tags in the category plus the home allocation τ_cat"""

    cat = CategoryId.parse(cat)
    return math.fsum(
        [v.duration for v in log.visits if cat in categories_of(catalog, v.tag)]
        + [log.home.allocations[cat]]
    )


def category_score(log: DayLog, catalog: TagCatalog, cat: CategoryId) -> float:
    """M_cat: Σ Y(x)·Z_cat(x) over the category's visits plus τ_cat·ξ_cat"""

    cat = CategoryId.parse(cat)
    return math.fsum(
        [
            v.duration * catalog.weight(v.tag, cat)
            for v in log.visits
            if cat in categories_of(catalog, v.tag)
        ]
        + [log.home.allocations[cat] * log.home.weights[cat]]
    )


def breakdown(log: DayLog, catalog: TagCatalog) -> CategoryBreakdown:
    """K_i and M_i for all five categories"""

    result = CategoryBreakdown(
        times={cat: category_time(log, catalog, cat) for cat in CATEGORIES},
        scores={cat: category_score(log, catalog, cat) for cat in CATEGORIES},
    )
    LOGGER.debug("breakdown of %d visits: %r", len(log.visits), result.to_dict())
    return result


def catalog_from_dict(data: Mapping[str, Any]) -> TagCatalog:
    """parse ``{"tags": {tag: {category: weight}}, "default_other_weight": w}``"""

    data = require_mapping(data, "tag catalog")
    tags = require_mapping(data.get("tags", {}), "catalog tags")
    entries = {}
    for tag, weights in tags.items():
        if check_tag(tag) == HOME_TAG:
            raise ValidationError(
                "the home tag cannot be weighted in a catalog, "
                "configure it through the home profile"
            )
        weights = require_mapping(weights, f"weights of tag <{tag}>")
        entries[tag] = {
            CategoryId.parse(cat): as_float(w, f"weight of <{tag}> in <{cat}>")
            for cat, w in weights.items()
        }
    default = data.get("default_other_weight", DEFAULT_OTHER_WEIGHT)
    return TagCatalog(
        entries=entries,
        default_other_weight=as_float(default, "default_other_weight"),
    )


def load_catalog(path: PathLike) -> TagCatalog:
    """read a tag catalog file"""
    LOGGER.info("loading tag catalog from <%s>", path)
    return catalog_from_dict(load_json(path))


def merge_catalog(catalog: TagCatalog, fragment: Mapping[str, Any]) -> TagCatalog:
    """overlay a weights fragment onto a catalog, per (tag, category)"""

    update = catalog_from_dict({"tags": fragment.get("tags", fragment)})
    entries = {tag: dict(weights) for tag, weights in catalog.entries.items()}
    for tag, weights in update.entries.items():
        entries.setdefault(tag, {}).update(weights)
    LOGGER.info("merged weights for %d tags into the catalog", len(update.entries))
    return TagCatalog(entries=entries, default_other_weight=catalog.default_other_weight)


def home_from_dict(data: Optional[Mapping[str, Any]]) -> HomeProfile:
    """parse the ``home`` object of a day log"""
    if not data:
        return HomeProfile()
    data = require_mapping(data, "home profile")
    return HomeProfile(
        total_home_time=data.get("total_hours", 0),
        allocations=require_mapping(data.get("allocations", {}), "home allocations"),
        weights=require_mapping(data.get("weights", {}), "home weights"),
    )


def day_log_from_dict(data: Mapping[str, Any]) -> DayLog:
    """parse ``{"visits": [{"tag": ..., "hours": ...}], "home": {...}}``"""

    data = require_mapping(data, "day log")
    visits = []
    for item in data.get("visits") or ():
        item = require_mapping(item, "visit")
        start = item.get("start")
        visits.append(
            Visit(
                tag=item.get("tag"),
                duration=as_float(item.get("hours"), f"hours of <{item.get('tag')}>"),
                start=None if start is None else as_float(start, "visit start"),
            )
        )
    return DayLog(visits=tuple(visits), home=home_from_dict(data.get("home")))


def day_log_to_dict(log: DayLog) -> Dict[str, Any]:
    """day log file representation"""

    visits = []
    for visit in log.visits:
        item = {"tag": visit.tag, "hours": visit.duration}
        if visit.start is not None:
            item["start"] = visit.start
        visits.append(item)
    return {"visits": visits, "home": log.home.to_dict()}


def load_day_log(path: PathLike) -> DayLog:
    """read a day log file"""
    LOGGER.info("loading day log from <%s>", path)
    return day_log_from_dict(load_json(path))


def day_log_total(logs: Iterable[DayLog]) -> DayLog:
    """concatenate visits and add home profiles category by category"""

    logs = list(logs)
    visits = tuple(v for log in logs for v in log.visits)
    allocations = {
        cat: math.fsum(log.home.allocations[cat] for log in logs) for cat in CATEGORIES
    }
    total = math.fsum(log.home.total_home_time for log in logs)

    # only days spent partly at home carry meaningful home weights
    weighted = [dict(log.home.weights) for log in logs if log.home.total_home_time > 0]
    weighted = weighted or [dict(log.home.weights) for log in logs[:1]]
    if any(w != weighted[0] for w in weighted[1:]):
        raise ValidationError("cannot add day logs with different home weights")
    weights = weighted[0] if weighted else {}
    return DayLog(
        visits=visits,
        home=HomeProfile(total_home_time=total, allocations=allocations, weights=weights),
    )
