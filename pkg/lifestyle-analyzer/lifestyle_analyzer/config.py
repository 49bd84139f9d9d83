# -*- coding: utf-8 -*-

"""Run configuration with environment defaults."""

import logging
import os
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Optional

from dotenv import load_dotenv
from pytility import parse_float, parse_int

from lifestyle_analyzer.ingest import StayPointParams
from lifestyle_analyzer.utils import ValidationError

LOGGER = logging.getLogger(__name__)

OUTPUT_FORMATS = ("json", "table", "csv")

ENV_PREFIX = "LIFESTYLE_"


@dataclass(frozen=True)
class RunConfig:
    """Configuration file paths, stay point parameters and output format."""

    catalog: Optional[str] = None
    membership: Optional[str] = None
    rules: Optional[str] = None
    poi_db: Optional[str] = None
    allocation: Optional[str] = None
    nearby_url: Optional[str] = None
    params: StayPointParams = field(default_factory=StayPointParams)
    output_format: str = "table"

    def __post_init__(self):
        if self.output_format not in OUTPUT_FORMATS:
            raise ValidationError(
                f"unknown output format <{self.output_format}>, "
                f"choose one of {', '.join(OUTPUT_FORMATS)}"
            )

    @classmethod
    def from_env(
        cls,
        env: Optional[Mapping[str, str]] = None,
        dotenv: bool = True,
    ) -> "RunConfig":
        """defaults from ``LIFESTYLE_*`` variables (and a ``.env`` file)"""

        if env is None:
            if dotenv:
                load_dotenv()
            env = os.environ

        def get(name: str) -> Optional[str]:
            return env.get(ENV_PREFIX + name) or None

        defaults = StayPointParams()
        day_boundary = parse_int(get("DAY_BOUNDARY"))
        dwell = parse_float(get("DWELL_MIN"))
        distance = parse_float(get("DIST_M"))
        radius = parse_float(get("POI_RADIUS_M"))

        params = StayPointParams(
            distance_threshold=defaults.distance_threshold if distance is None else distance,
            min_dwell=defaults.min_dwell if dwell is None else dwell,
            poi_radius=defaults.poi_radius if radius is None else radius,
            home_work_radius=defaults.home_work_radius,
            day_boundary_hour=(
                defaults.day_boundary_hour if day_boundary is None else day_boundary
            ),
            timezone=get("TIMEZONE") or defaults.timezone,
        )

        return cls(
            catalog=get("CATALOG"),
            membership=get("MEMBERSHIP"),
            rules=get("RULES"),
            poi_db=get("POI_DB"),
            allocation=get("ALLOCATION"),
            nearby_url=get("NEARBY_URL"),
            params=params,
            output_format=(get("FORMAT") or "table").lower(),
        )

    def update(self: "RunConfig", **overrides: Any) -> "RunConfig":
        """copy with non-``None`` overrides; stay point fields go into ``params``"""

        param_fields = set(StayPointParams.__dataclass_fields__)
        params = {
            k: v for k, v in overrides.items() if k in param_fields and v is not None
        }
        own = {
            k: v for k, v in overrides.items() if k not in param_fields and v is not None
        }
        if params:
            own["params"] = replace(self.params, **params)
        return replace(self, **own)

    def check(self: "RunConfig", *names: str) -> None:
        """the named file settings (all of them by default) are set and exist"""

        names = names or ("catalog", "membership", "rules")
        violations = []
        for name in names:
            path = getattr(self, name)
            if not path:
                violations.append(
                    f"no {name.replace('_', ' ')} file given "
                    f"(--{name.replace('_', '-')} or {ENV_PREFIX}{name.upper()})"
                )
            elif not os.path.isfile(path):
                violations.append(f"{name.replace('_', ' ')} file <{path}> does not exist")
        if violations:
            raise ValidationError("incomplete run configuration", violations)
        LOGGER.debug("run configuration: %r", self)
