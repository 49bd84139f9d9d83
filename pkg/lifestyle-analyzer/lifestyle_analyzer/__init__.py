# -*- coding: utf-8 -*-

"""Fuzzy lifestyle analysis and recommendations for students."""

from lifestyle_analyzer.__version__ import VERSION, __version__
from lifestyle_analyzer.analyzer import AnalysisResult, LifestyleAnalyzer
from lifestyle_analyzer.base import BasePoiResolver
from lifestyle_analyzer.core import (
    CategoryBreakdown,
    CategoryId,
    DayLog,
    HomeProfile,
    QuantityKind,
    TagCatalog,
    Visit,
    breakdown,
)
from lifestyle_analyzer.inference import (
    Attribute,
    Recommendation,
    RecommendationReport,
    RuleBase,
    recommend,
)
from lifestyle_analyzer.ingest import (
    GpsPoint,
    PoiDatabase,
    StayPoint,
    StayPointParams,
    trace_to_daylog,
)
from lifestyle_analyzer.membership import (
    LinguisticVariable,
    MembershipConfig,
    TrapezoidMF,
    calibrate,
)
from lifestyle_analyzer.nearby import NearbySearchResolver
from lifestyle_analyzer.utils import LifestyleError, ValidationError
