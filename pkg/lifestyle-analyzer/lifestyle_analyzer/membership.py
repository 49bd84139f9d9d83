# -*- coding: utf-8 -*-

"""Trapezoidal membership functions, quartile calibration and survey weights."""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import (
    Any,
    Dict,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np
from pytility import arg_to_iter, clear_list

from lifestyle_analyzer.core import CATEGORIES, CategoryId, QuantityKind, check_tag
from lifestyle_analyzer.utils import (
    PathLike,
    ValidationError,
    as_float,
    load_json,
    require_mapping,
)

LOGGER = logging.getLogger(__name__)

TIME_TERMS: Mapping[CategoryId, Tuple[str, ...]] = MappingProxyType(
    {
        CategoryId.HEALTH: ("unfit", "fit", "proactive"),
        CategoryId.LEISURE: ("hectic", "ideal", "lazy"),
        CategoryId.SOCIAL: ("reserved", "sociable", "over_social"),
        CategoryId.WORK: ("lethargic", "hard_working", "industrious"),
        CategoryId.OTHER: ("non_productive", "productive"),
    }
)
SCORE_TERMS: Tuple[str, ...] = ("low_score", "ideal_score", "high_score")
TERM_ALIASES: Mapping[str, str] = MappingProxyType({"less_score": "low_score"})

Slot = Tuple[CategoryId, QuantityKind, str]


def canonical_term(term: str) -> str:
    """normalised term name, resolving aliases such as ``less_score``"""
    term = str(term).strip().lower()
    return TERM_ALIASES.get(term, term)


def terms_for(category: CategoryId, kind: QuantityKind) -> Tuple[str, ...]:
    """linguistic terms of a (category, kind) variable"""
    category = CategoryId.parse(category)
    kind = QuantityKind.parse(kind)
    return TIME_TERMS[category] if kind is QuantityKind.TIME else SCORE_TERMS


def all_slots() -> Tuple[Slot, ...]:
    """every (category, kind, term) a complete configuration covers"""
    return tuple(
        (cat, kind, term)
        for cat in CATEGORIES
        for kind in QuantityKind
        for term in terms_for(cat, kind)
    )


def slot_name(slot: Slot) -> str:
    """``category/kind/term``"""
    cat, kind, term = slot
    return f"{cat}/{kind}/{term}"


@dataclass(frozen=True)
class TrapezoidMF:
    """Trapezoid over a crisp axis: 0 outside [a, d], 1 on [b, c], linear between."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        values = tuple(float(v) for v in (self.a, self.b, self.c, self.d))
        if not all(math.isfinite(v) for v in values):
            raise ValidationError(f"trapezoid parameters must be finite: {values}")
        if not values[0] <= values[1] <= values[2] <= values[3]:
            raise ValidationError(f"trapezoid needs a <= b <= c <= d, got {values}")
        for name, value in zip("abcd", values):
            object.__setattr__(self, name, value)

    @property
    def params(self: "TrapezoidMF") -> Tuple[float, float, float, float]:
        """(a, b, c, d)"""
        return (self.a, self.b, self.c, self.d)

    def evaluate(self: "TrapezoidMF", xs) -> np.ndarray:
        """membership degrees for an array of crisp values"""

        xs = np.asarray(xs, dtype=float)
        a, b, c, d = self.params

        # vertical edges (a == b or c == d) are 1 at the shared point
        rise = np.clip((xs - a) / (b - a), 0, 1) if b > a else (xs >= a) * 1.0
        fall = np.clip((d - xs) / (d - c), 0, 1) if d > c else (xs <= d) * 1.0

        return np.minimum(rise, fall)

    def __call__(self: "TrapezoidMF", x: float) -> float:
        return mf_eval(self, x)


def mf_eval(mf: TrapezoidMF, x: float) -> float:
    """degree of membership of ``x``"""
    return float(mf.evaluate(np.array([x], dtype=float))[0])


def quartiles(samples: Sequence[float]) -> Tuple[float, float, float]:
    """Q1, Q2, Q3 at rank (n + 1)·p, linearly interpolated between order statistics"""

    values = np.asarray(list(arg_to_iter(samples)), dtype=float)
    if not values.size:
        raise ValidationError("cannot compute quartiles of an empty sample")
    q1, q2, q3 = np.quantile(values, (0.25, 0.5, 0.75), method="weibull")
    return float(q1), float(q2), float(q3)


def mf_from_samples(samples: Sequence[float]) -> TrapezoidMF:
    """trapezoid (inf, Q1, Q3, sup) approximating a sample"""

    values = list(arg_to_iter(samples))
    if not values:
        raise ValidationError("no samples to build a membership function from")
    q1, _, q3 = quartiles(values)
    return TrapezoidMF(a=min(values), b=q1, c=q3, d=max(values))


@dataclass(frozen=True)
class LinguisticVariable:
    """The linguistic terms of one (category, kind) pair."""

    category: CategoryId
    kind: QuantityKind
    terms: Mapping[str, TrapezoidMF] = field(default_factory=dict)

    def __post_init__(self):
        category = CategoryId.parse(self.category)
        kind = QuantityKind.parse(self.kind)
        terms = {canonical_term(name): mf for name, mf in self.terms.items()}
        allowed = terms_for(category, kind)
        unknown = sorted(set(terms) - set(allowed))
        if unknown:
            raise ValidationError(
                f"unknown terms {unknown} for <{category}/{kind}>, "
                f"expected {list(allowed)}"
            )
        # keep the canonical term order
        ordered = {name: terms[name] for name in allowed if name in terms}
        object.__setattr__(self, "category", category)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "terms", MappingProxyType(ordered))

    @property
    def missing_terms(self: "LinguisticVariable") -> Tuple[str, ...]:
        """terms of the fixed term set without a membership function"""
        return tuple(t for t in terms_for(self.category, self.kind) if t not in self.terms)

    @property
    def support(self: "LinguisticVariable") -> Tuple[float, float]:
        """union of all term supports"""
        if not self.terms:
            raise ValidationError(f"variable <{self.category}/{self.kind}> has no terms")
        return (
            min(mf.a for mf in self.terms.values()),
            max(mf.d for mf in self.terms.values()),
        )


def variable_eval(var: LinguisticVariable, x: float) -> Dict[str, float]:
    """one degree per term, not normalised across terms"""
    return {term: mf_eval(mf, x) for term, mf in var.terms.items()}


@dataclass(frozen=True)
class MembershipConfig:
    """Complete set of linguistic variables, one per (category, kind)."""

    variables: Mapping[Tuple[CategoryId, QuantityKind], LinguisticVariable]

    def __post_init__(self):
        variables = {}
        violations = []

        for var in (
            self.variables.values()
            if isinstance(self.variables, Mapping)
            else self.variables
        ):
            key = (var.category, var.kind)
            if key in variables:
                violations.append(f"duplicate variable <{var.category}/{var.kind}>")
            variables[key] = var

        for cat in CATEGORIES:
            for kind in QuantityKind:
                var = variables.get((cat, kind))
                if var is None:
                    violations.append(f"missing variable <{cat}/{kind}>")
                    continue
                violations.extend(
                    f"missing term <{cat}/{kind}/{term}>" for term in var.missing_terms
                )

        if violations:
            raise ValidationError("incomplete membership configuration", violations)

        object.__setattr__(self, "variables", MappingProxyType(variables))

    def variable(
        self: "MembershipConfig",
        category: CategoryId,
        kind: QuantityKind,
    ) -> LinguisticVariable:
        """the linguistic variable of a (category, kind) pair"""
        key = (CategoryId.parse(category), QuantityKind.parse(kind))
        try:
            return self.variables[key]
        except KeyError:
            raise ValidationError(f"no variable <{key[0]}/{key[1]}>") from None

    def mf(
        self: "MembershipConfig",
        category: CategoryId,
        kind: QuantityKind,
        term: str,
    ) -> TrapezoidMF:
        """membership function of a (category, kind, term) slot"""
        var = self.variable(category, kind)
        term = canonical_term(term)
        try:
            return var.terms[term]
        except KeyError:
            raise ValidationError(
                f"no term <{var.category}/{var.kind}/{term}> in the membership "
                "configuration"
            ) from None

    def curve(
        self: "MembershipConfig",
        category: CategoryId,
        kind: QuantityKind,
        resolution: int = 101,
    ) -> Tuple[np.ndarray, Dict[str, np.ndarray]]:
        """uniform samples of every term over the union of supports"""

        if resolution < 2:
            raise ValidationError(f"resolution must be at least 2, got {resolution}")
        var = self.variable(category, kind)
        low, high = var.support
        xs = np.linspace(low, high, resolution)
        return xs, {term: mf.evaluate(xs) for term, mf in var.terms.items()}

    def to_dict(self: "MembershipConfig") -> Dict[str, Dict[str, Dict[str, List[float]]]]:
        """``{category: {kind: {term: [a, b, c, d]}}}``"""
        result: Dict[str, Dict[str, Dict[str, List[float]]]] = {}
        for (cat, kind), var in self.variables.items():
            result.setdefault(str(cat), {})[str(kind)] = {
                term: list(mf.params) for term, mf in var.terms.items()
            }
        return result


def membership_from_dict(data: Mapping[str, Any]) -> MembershipConfig:
    """parse ``{category: {kind: {term: [a, b, c, d]}}}``"""

    data = require_mapping(data, "membership configuration")
    variables = []
    for cat_name, kinds in data.items():
        cat = CategoryId.parse(cat_name)
        kinds = require_mapping(kinds, f"membership of <{cat}>")
        for kind_name, terms in kinds.items():
            kind = QuantityKind.parse(kind_name)
            terms = require_mapping(terms, f"terms of <{cat}/{kind}>")
            mfs = {}
            for term, params in terms.items():
                if not isinstance(params, (list, tuple)) or len(params) != 4:
                    raise ValidationError(
                        f"<{cat}/{kind}/{term}> needs four parameters [a, b, c, d]"
                    )
                mfs[term] = TrapezoidMF(
                    *(as_float(p, f"parameter of <{cat}/{kind}/{term}>") for p in params)
                )
            variables.append(LinguisticVariable(category=cat, kind=kind, terms=mfs))
    return MembershipConfig(variables=variables)


def load_membership(path: PathLike) -> MembershipConfig:
    """read a membership configuration file"""
    LOGGER.info("loading membership functions from <%s>", path)
    return membership_from_dict(load_json(path))


def score_sample(rows: Iterable[Tuple[float, float]]) -> float:
    """Σ w_i·t_i over one respondent's (time, weight) rows"""

    products = []
    for time, weight in rows:
        if time < 0:
            raise ValidationError(f"survey time <{time}> is negative")
        products.append(time * weight)
    return math.fsum(products)


def calibrate(samples: Mapping[Slot, Sequence[float]]) -> MembershipConfig:
    """membership configuration with one (inf, Q1, Q3, sup) trapezoid per slot"""

    by_slot = {
        (CategoryId.parse(c), QuantityKind.parse(k), canonical_term(t)): list(v)
        for (c, k, t), v in samples.items()
    }
    gaps = [slot_name(slot) for slot in all_slots() if not by_slot.get(slot)]
    if gaps:
        raise ValidationError("missing calibration samples", gaps)

    variables = []
    for cat in CATEGORIES:
        for kind in QuantityKind:
            terms = {
                term: mf_from_samples(by_slot[(cat, kind, term)])
                for term in terms_for(cat, kind)
            }
            variables.append(LinguisticVariable(category=cat, kind=kind, terms=terms))
            LOGGER.debug("calibrated <%s/%s>: %r", cat, kind, terms)

    return MembershipConfig(variables=variables)


def calibration_diagnostics(
    samples: Mapping[Slot, Sequence[float]],
) -> List[Dict[str, Any]]:
    """per slot sample size, trapezoid parameters and the median Q2"""

    rows = []
    for slot in all_slots():
        values = samples.get(slot)
        if not values:
            continue
        q1, q2, q3 = quartiles(values)
        rows.append(
            {
                "category": str(slot[0]),
                "kind": str(slot[1]),
                "term": slot[2],
                "n": len(values),
                "a": float(min(values)),
                "b": q1,
                "q2": q2,
                "c": q3,
                "d": float(max(values)),
            }
        )
    return rows


def _sample_value(value: Any, what: str) -> float:
    # a respondent given as [[time, weight], ...] rows is reduced to its score
    if isinstance(value, (list, tuple)):
        rows = []
        for row in value:
            if not isinstance(row, (list, tuple)) or len(row) != 2:
                raise ValidationError(f"{what}: score rows must be [time, weight] pairs")
            rows.append((as_float(row[0], what), as_float(row[1], what)))
        return score_sample(rows)
    return as_float(value, what)


def calibration_samples_from_dict(data: Mapping[str, Any]) -> Dict[Slot, List[float]]:
    """parse ``{category: {kind: {term: [sample, ...]}}}``"""

    data = require_mapping(data, "calibration samples")
    samples: Dict[Slot, List[float]] = {}
    for cat_name, kinds in data.items():
        cat = CategoryId.parse(cat_name)
        for kind_name, terms in require_mapping(kinds, f"samples of <{cat}>").items():
            kind = QuantityKind.parse(kind_name)
            allowed = terms_for(cat, kind)
            for term, values in require_mapping(terms, f"<{cat}/{kind}>").items():
                term = canonical_term(term)
                if term not in allowed:
                    raise ValidationError(f"unknown term <{cat}/{kind}/{term}>")
                what = f"sample of <{cat}/{kind}/{term}>"
                samples[(cat, kind, term)] = [
                    _sample_value(v, what) for v in arg_to_iter(values)
                ]
    return samples


def load_calibration_samples(path: PathLike) -> Dict[Slot, List[float]]:
    """read a calibration samples file"""
    LOGGER.info("loading calibration samples from <%s>", path)
    return calibration_samples_from_dict(load_json(path))


class Polarity(Enum):
    """Whether a survey asked for the most positive or most negative tag."""

    POSITIVE = "positive"
    NEGATIVE = "negative"

    @classmethod
    def parse(cls, value: Any) -> "Polarity":
        """polarity from its name"""
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValidationError(f"unknown polarity <{value}>") from None


@dataclass(frozen=True)
class SurveyVote:
    """Share of respondents (in percent) who picked a tag."""

    option: str
    percent: float

    def __post_init__(self):
        object.__setattr__(self, "option", check_tag(self.option))
        percent = as_float(self.percent, f"percent of <{self.option}>")
        if not 0 <= percent <= 100:
            raise ValidationError(
                f"percent of <{self.option}> must lie in [0, 100], got {percent:g}"
            )
        object.__setattr__(self, "percent", percent)


def weights_from_votes(
    votes: Iterable[SurveyVote],
    polarity: Union[Polarity, str],
) -> Dict[str, float]:
    """tag weight = vote share, negated for negative surveys"""

    polarity = Polarity.parse(polarity)
    return {
        vote.option: (
            -vote.percent if polarity is Polarity.NEGATIVE and vote.percent else vote.percent
        )
        for vote in votes
    }


@dataclass(frozen=True)
class VoteRecord:
    """One line of a survey vote file."""

    vote: SurveyVote
    polarity: Polarity = Polarity.POSITIVE
    category: CategoryId = CategoryId.HEALTH


def validate_votes(records: Iterable[VoteRecord]) -> List[str]:
    """flag surveys whose shares add up to more than 100 % (multi-select)"""

    totals: Dict[Tuple[CategoryId, Polarity], float] = {}
    for record in records:
        key = (record.category, record.polarity)
        totals[key] = totals.get(key, 0.0) + record.vote.percent

    return [
        f"<{cat}> {polarity.value} survey shares add up to {total:g} %, "
        "treating it as a multi-select survey"
        for (cat, polarity), total in sorted(
            totals.items(), key=lambda item: (item[0][0].value, item[0][1].value)
        )
        if total > 100
    ]


def votes_from_list(
    data: Any,
    default_category: Optional[CategoryId] = None,
) -> List[VoteRecord]:
    """parse ``[{"tag": ..., "percent": ..., "polarity": ...}]``"""

    if data is None:
        return []
    if not isinstance(data, list):
        raise ValidationError("survey votes must be a JSON list")

    default_category = CategoryId.parse(default_category or CategoryId.HEALTH)
    records = []
    violations = []
    for item in data:
        try:
            item = require_mapping(item, "survey vote")
            records.append(
                VoteRecord(
                    vote=SurveyVote(option=item.get("tag"), percent=item.get("percent")),
                    polarity=Polarity.parse(item.get("polarity", "positive")),
                    category=CategoryId.parse(item.get("category", default_category)),
                )
            )
        except ValidationError as exc:
            violations.append(str(exc))

    if violations:
        raise ValidationError("invalid survey votes", violations)

    return records


def load_votes(
    path: PathLike,
    default_category: Optional[CategoryId] = None,
) -> List[VoteRecord]:
    """read a survey vote file"""
    LOGGER.info("loading survey votes from <%s>", path)
    return votes_from_list(load_json(path), default_category=default_category)


def catalog_fragment(records: Iterable[VoteRecord]) -> Dict[str, Dict[str, Dict[str, float]]]:
    """``{"tags": {tag: {category: weight}}}`` ready to merge into a catalog"""

    records = list(records)
    tags: Dict[str, Dict[str, float]] = {}

    for cat in clear_list(r.category for r in records):
        for polarity in Polarity:
            votes = [r.vote for r in records if r.category is cat and r.polarity is polarity]
            for tag, weight in weights_from_votes(votes, polarity).items():
                weights = tags.setdefault(tag, {})
                if str(cat) in weights:
                    LOGGER.warning(
                        "tag <%s> voted more than once for <%s>, keeping the last vote",
                        tag,
                        cat,
                    )
                weights[str(cat)] = weight

    return {"tags": tags}
