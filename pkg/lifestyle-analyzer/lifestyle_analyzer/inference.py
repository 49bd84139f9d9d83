# -*- coding: utf-8 -*-

"""Rule base, equal-weight rule scores and most-probable selection."""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Tuple, Union

import pandas as pd
from pytility import arg_to_iter

from lifestyle_analyzer.core import CategoryBreakdown, CategoryId, QuantityKind
from lifestyle_analyzer.membership import MembershipConfig, canonical_term, mf_eval
from lifestyle_analyzer.utils import PathLike, ValidationError, load_json, require_mapping

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Attribute:
    """A (category, quantity kind, linguistic term) condition of a rule."""

    category: CategoryId
    kind: QuantityKind
    term: str

    def __post_init__(self):
        object.__setattr__(self, "category", CategoryId.parse(self.category))
        object.__setattr__(self, "kind", QuantityKind.parse(self.kind))
        object.__setattr__(self, "term", canonical_term(self.term))

    def __str__(self):
        symbol = "K" if self.kind is QuantityKind.TIME else "M"
        return f"{symbol}_{self.category}={self.term}"

    def to_dict(self: "Attribute") -> Dict[str, str]:
        """rule base file representation"""
        return {"category": str(self.category), "kind": str(self.kind), "term": self.term}


@dataclass(frozen=True)
class Recommendation:
    """A recommendation text and the attributes that call for it."""

    id: str
    text: str
    attributes: Tuple[Attribute, ...]

    def __post_init__(self):
        attributes = tuple(arg_to_iter(self.attributes))
        if not attributes:
            raise ValidationError(f"recommendation <{self.id}> has no attributes")
        object.__setattr__(self, "attributes", attributes)


@dataclass(frozen=True)
class RuleBase:
    """Ordered recommendations; position decides ties."""

    rules: Tuple[Recommendation, ...]

    def __post_init__(self):
        rules = tuple(arg_to_iter(self.rules))
        if not rules:
            raise ValidationError("the rule base is empty")
        seen = set()
        duplicates = []
        for rule in rules:
            if rule.id in seen:
                duplicates.append(f"duplicate rule id <{rule.id}>")
            seen.add(rule.id)
        if duplicates:
            raise ValidationError("invalid rule base", duplicates)
        object.__setattr__(self, "rules", rules)

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)


@dataclass(frozen=True)
class RuleResult:
    """Degrees and score of one rule."""

    id: str
    text: str
    attributes: Tuple[Attribute, ...]
    degrees: Tuple[float, ...]
    rho: float
    position: int


@dataclass(frozen=True)
class RecommendationReport:
    """All rules by descending score plus the chosen one."""

    rows: Tuple[RuleResult, ...]
    chosen: str

    @property
    def chosen_rule(self: "RecommendationReport") -> RuleResult:
        """row of the selected recommendation"""
        return next(row for row in self.rows if row.id == self.chosen)

    @property
    def warning(self: "RecommendationReport") -> bool:
        """no rule matched at all, the choice is arbitrary"""
        return self.chosen_rule.rho == 0

    def scores(self: "RecommendationReport") -> Dict[str, float]:
        """rule id → ρ"""
        return {row.id: row.rho for row in self.rows}

    def to_dict(self: "RecommendationReport") -> Dict[str, Any]:
        """JSON representation"""
        return {
            "chosen": self.chosen,
            "chosen_text": self.chosen_rule.text,
            "warning": self.warning,
            "rules": [
                {
                    "id": row.id,
                    "text": row.text,
                    "attributes": [str(attr) for attr in row.attributes],
                    "degrees": list(row.degrees),
                    "rho": row.rho,
                }
                for row in self.rows
            ],
        }

    def to_frame(self: "RecommendationReport") -> pd.DataFrame:
        """one line per rule: id, text, μ vector, ρ, chosen marker"""
        return pd.DataFrame(
            data=[
                {
                    "id": row.id,
                    "text": row.text,
                    "mu": "{" + ", ".join(f"{d:.3f}" for d in row.degrees) + "}",
                    "rho": round(row.rho, 6),
                    "chosen": "*" if row.id == self.chosen else "",
                }
                for row in self.rows
            ],
            columns=["id", "text", "mu", "rho", "chosen"],
        )


def attribute_membership(
    bd: CategoryBreakdown,
    cfg: MembershipConfig,
    attr: Attribute,
) -> float:
    """degree to which the day's K or M value fits the attribute's term"""
    mf = cfg.mf(attr.category, attr.kind, attr.term)
    return mf_eval(mf, bd.crisp(attr.category, attr.kind))


def rule_score(degrees: Iterable[float]) -> float:
    """ρ: arithmetic mean of the attribute degrees"""

    degrees = list(degrees)
    if not degrees:
        raise ValidationError("a rule needs at least one attribute degree")
    for degree in degrees:
        if not 0 <= degree <= 1:
            raise ValidationError(f"membership degree <{degree}> outside [0, 1]")
    return math.fsum(degrees) / len(degrees)


def validate_rule_base(rules: RuleBase, cfg: MembershipConfig) -> List[str]:
    """attributes that do not resolve to a membership function"""

    violations = []
    for rule in rules:
        for attr in rule.attributes:
            try:
                cfg.mf(attr.category, attr.kind, attr.term)
            except ValidationError as exc:
                violations.append(f"rule <{rule.id}>: {exc}")
    return violations


def recommend(
    bd: CategoryBreakdown,
    cfg: MembershipConfig,
    rules: Union[RuleBase, Iterable[Recommendation]],
) -> RecommendationReport:
    """score every rule and pick the one with maximal ρ, earliest on ties"""

    rules = rules if isinstance(rules, RuleBase) else RuleBase(rules=tuple(rules))

    violations = validate_rule_base(rules, cfg)
    if violations:
        raise ValidationError("unresolvable rule attributes", violations)

    results = []
    for position, rule in enumerate(rules):
        degrees = tuple(attribute_membership(bd, cfg, attr) for attr in rule.attributes)
        rho = rule_score(degrees)
        LOGGER.debug("rule <%s>: degrees %r, score %.4f", rule.id, degrees, rho)
        results.append(
            RuleResult(
                id=rule.id,
                text=rule.text,
                attributes=rule.attributes,
                degrees=degrees,
                rho=rho,
                position=position,
            )
        )

    # stable sort keeps rule base order among equal scores
    rows = tuple(sorted(results, key=lambda row: -row.rho))
    report = RecommendationReport(rows=rows, chosen=rows[0].id)

    if report.warning:
        LOGGER.warning(
            "no rule matches the day (all scores are 0), emitting <%s> anyway",
            report.chosen,
        )
    else:
        LOGGER.info("chose rule <%s> with score %.4f", report.chosen, rows[0].rho)

    return report


def rule_base_from_dict(data: Mapping[str, Any]) -> RuleBase:
    """parse ``{"rules": [{"id", "text", "attributes": [...]}]}``"""

    data = require_mapping(data, "rule base")
    rules = []
    for item in data.get("rules") or ():
        item = require_mapping(item, "rule")
        rule_id = str(item.get("id", "")).strip()
        if not rule_id:
            raise ValidationError("every rule needs an id")
        attributes = tuple(
            Attribute(
                category=attr.get("category"),
                kind=attr.get("kind"),
                term=attr.get("term", ""),
            )
            for attr in (
                require_mapping(a, f"attribute of rule <{rule_id}>")
                for a in item.get("attributes") or ()
            )
        )
        rules.append(
            Recommendation(id=rule_id, text=str(item.get("text", "")), attributes=attributes)
        )
    return RuleBase(rules=tuple(rules))


def rule_base_to_dict(rules: RuleBase) -> Dict[str, Any]:
    """rule base file representation"""
    return {
        "rules": [
            {
                "id": rule.id,
                "text": rule.text,
                "attributes": [attr.to_dict() for attr in rule.attributes],
            }
            for rule in rules
        ]
    }


def load_rule_base(path: PathLike) -> RuleBase:
    """read a rule base file"""
    LOGGER.info("loading rule base from <%s>", path)
    return rule_base_from_dict(load_json(path))
