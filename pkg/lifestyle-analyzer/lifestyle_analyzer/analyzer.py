# -*- coding: utf-8 -*-

"""File-driven analysis: day log or GPS trace in, recommendation out."""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Mapping, Optional, Sequence

import pandas as pd
from pytility import arg_to_iter

from lifestyle_analyzer.base import BasePoiResolver
from lifestyle_analyzer.core import (
    CATEGORIES,
    CategoryBreakdown,
    DayLog,
    TagCatalog,
    breakdown,
    load_catalog,
    merge_catalog,
    validate_catalog,
)
from lifestyle_analyzer.inference import (
    RecommendationReport,
    RuleBase,
    load_rule_base,
    recommend,
    validate_rule_base,
)
from lifestyle_analyzer.ingest import GpsPoint, StayPointParams, trace_to_daylog
from lifestyle_analyzer.membership import MembershipConfig, load_membership
from lifestyle_analyzer.utils import PathLike, ValidationError, load_json

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class AnalysisResult:
    """Day log, its category breakdown and the recommendation report."""

    day_log: DayLog
    breakdown: CategoryBreakdown
    report: RecommendationReport

    @property
    def chosen_text(self: "AnalysisResult") -> str:
        """text of the selected recommendation"""
        return self.report.chosen_rule.text

    def breakdown_frame(self: "AnalysisResult") -> pd.DataFrame:
        """one line per category with K and M"""
        return pd.DataFrame(
            data=[
                {
                    "category": str(cat),
                    "time": self.breakdown.time(cat),
                    "score": self.breakdown.score(cat),
                }
                for cat in CATEGORIES
            ],
            columns=["category", "time", "score"],
        )

    def to_dict(self: "AnalysisResult") -> Dict[str, Any]:
        """JSON body of an analysis"""
        return {
            "breakdown": self.breakdown.to_dict(),
            "recommendation": self.report.to_dict(),
        }

    def to_table(self: "AnalysisResult") -> str:
        """fixed-width text report"""

        lines = [
            "category breakdown",
            self.breakdown_frame().to_string(
                index=False, float_format=lambda x: f"{x:.3f}"
            ),
            "",
            "rule scores",
            self.report.to_frame().to_string(
                index=False, float_format=lambda x: f"{x:.3f}"
            ),
            "",
            f"recommendation: {self.chosen_text}",
        ]
        if self.report.warning:
            lines.append("warning: no rule matches this day")
        return "\n".join(lines) + "\n"

    def to_csv(self: "AnalysisResult") -> str:
        """rule scores as CSV"""
        return self.report.to_frame().to_csv(index=False)


class LifestyleAnalyzer:
    """Catalog, membership functions and rule base bundled for analysis."""

    logger = logging.getLogger(__name__ + ".LifestyleAnalyzer")

    def __init__(
        self: "LifestyleAnalyzer",
        catalog: TagCatalog,
        membership: MembershipConfig,
        rules: RuleBase,
        *,
        strict: bool = True,
    ):
        violations = validate_catalog(catalog) + validate_rule_base(rules, membership)
        if violations and strict:
            raise ValidationError("invalid analysis configuration", violations)
        for violation in violations:
            self.logger.warning(violation)

        self.catalog = catalog
        self.membership = membership
        self.rules = rules

        self.logger.info(
            "analyzer with %d tags and %d rules", len(catalog.entries), len(rules)
        )

    @classmethod
    def from_files(
        cls,
        catalog: PathLike,
        membership: PathLike,
        rules: PathLike,
        fragments: Optional[Iterable[PathLike]] = None,
        **kwargs,
    ) -> "LifestyleAnalyzer":
        """load configuration files; weight fragments are merged into the catalog"""

        tag_catalog = load_catalog(catalog)
        for fragment in arg_to_iter(fragments):
            LOGGER.info("merging weights fragment <%s>", fragment)
            tag_catalog = merge_catalog(tag_catalog, load_json(fragment))

        return cls(
            catalog=tag_catalog,
            membership=load_membership(membership),
            rules=load_rule_base(rules),
            **kwargs,
        )

    def breakdown(self: "LifestyleAnalyzer", log: DayLog) -> CategoryBreakdown:
        """K_i and M_i of a day"""
        return breakdown(log, self.catalog)

    def recommend(
        self: "LifestyleAnalyzer",
        bd: CategoryBreakdown,
    ) -> RecommendationReport:
        """score all rules against a breakdown"""
        return recommend(bd, self.membership, self.rules)

    def analyze(self: "LifestyleAnalyzer", log: DayLog) -> AnalysisResult:
        """breakdown and recommendation of a day log"""
        bd = self.breakdown(log)
        return AnalysisResult(day_log=log, breakdown=bd, report=self.recommend(bd))

    def analyze_trace(
        self: "LifestyleAnalyzer",
        trace: Sequence[GpsPoint],
        db: BasePoiResolver,
        params: Optional[StayPointParams] = None,
        allocation: Optional[Mapping[Any, float]] = None,
        home_weights: Optional[Mapping[Any, float]] = None,
        *,
        resolver: Optional[BasePoiResolver] = None,
    ) -> AnalysisResult:
        """ingest a GPS trace into a day log, then analyze it"""
        log = trace_to_daylog(
            trace,
            db,
            params,
            allocation_fractions=allocation,
            home_weights=home_weights,
            resolver=resolver,
        )
        return self.analyze(log)
