#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Main script & CLI entry point."""

import argparse
import logging
import sys
from typing import List, Optional

import pandas as pd

from lifestyle_analyzer.__version__ import __version__
from lifestyle_analyzer.analyzer import LifestyleAnalyzer
from lifestyle_analyzer.config import OUTPUT_FORMATS, RunConfig
from lifestyle_analyzer.core import (
    CategoryBreakdown,
    load_catalog,
    load_day_log,
    validate_catalog,
)
from lifestyle_analyzer.inference import load_rule_base, recommend, validate_rule_base
from lifestyle_analyzer.ingest import (
    load_allocation,
    load_poi_database,
    load_trace,
)
from lifestyle_analyzer.membership import (
    calibrate,
    calibration_diagnostics,
    catalog_fragment,
    load_calibration_samples,
    load_membership,
    load_votes,
    validate_votes,
)
from lifestyle_analyzer.nearby import NearbySearchResolver
from lifestyle_analyzer.utils import (
    ValidationError,
    dump_json,
    dumps_json,
    format_from_path,
    load_json,
    require_mapping,
)

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INVALID = 2


def _common_args() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--catalog", help="tag catalog file")
    parser.add_argument("--membership", help="membership functions file")
    parser.add_argument("--rules", help="rule base file")
    parser.add_argument("--poi-db", help="point-of-interest database file")
    parser.add_argument("--allocation", help="home time allocation file")
    parser.add_argument(
        "--fragment",
        action="append",
        help="weights fragment to merge into the catalog (repeatable)",
    )
    parser.add_argument(
        "--nearby-url", help="nearby search service instead of the offline database"
    )
    parser.add_argument("--format", "-f", choices=OUTPUT_FORMATS, help="output format")
    parser.add_argument("--out", "-o", help="output file (default: stdout)")
    parser.add_argument(
        "--day-boundary", type=int, help="local hour at which the analysis day starts"
    )
    parser.add_argument("--timezone", help="timezone of the analysis day")
    parser.add_argument("--dwell-min", type=float, help="minimal stay in minutes")
    parser.add_argument("--dist-m", type=float, help="stay point radius in meters")
    parser.add_argument(
        "--poi-radius-m", type=float, help="point-of-interest search radius in meters"
    )
    parser.add_argument(
        "--verbose",
        "-v",
        action="count",
        default=0,
        help="log level (repeat for more verbosity)",
    )
    return parser


def _parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    common = _common_args()
    parser = argparse.ArgumentParser(
        description="analyze a day of lifestyle data and recommend what to do next"
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    calibrate_parser = commands.add_parser(
        "calibrate", parents=[common], help="fit membership functions to survey samples"
    )
    calibrate_parser.add_argument("samples", help="calibration samples file")

    weights_parser = commands.add_parser(
        "weights", parents=[common], help="derive tag weights from survey votes"
    )
    weights_parser.add_argument("votes", help="survey votes file")
    weights_parser.add_argument(
        "--category", default="health", help="category of votes that do not name one"
    )

    commands.add_parser(
        "validate", parents=[common], help="check the configuration files"
    )

    analyze_parser = commands.add_parser(
        "analyze", parents=[common], help="analyze a day log (JSON) or GPS trace (CSV)"
    )
    analyze_parser.add_argument("input", help="day log or GPS trace file")

    recommend_parser = commands.add_parser(
        "recommend", parents=[common], help="recommend from a category breakdown"
    )
    recommend_parser.add_argument("breakdown", help="breakdown or analysis JSON file")

    plot_parser = commands.add_parser(
        "plot-mf", parents=[common], help="sample membership functions as CSV"
    )
    plot_parser.add_argument("category", help="category of the linguistic variable")
    plot_parser.add_argument("kind", help="time or score")
    plot_parser.add_argument(
        "--resolution", "-r", type=int, default=101, help="number of samples"
    )

    return parser.parse_args(argv)


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig.from_env().update(
        catalog=args.catalog,
        membership=args.membership,
        rules=args.rules,
        poi_db=args.poi_db,
        allocation=args.allocation,
        nearby_url=args.nearby_url,
        output_format=args.format,
        day_boundary_hour=args.day_boundary,
        timezone=args.timezone,
        min_dwell=args.dwell_min,
        distance_threshold=args.dist_m,
        poi_radius=args.poi_radius_m,
    )


def _emit(body: str, out: Optional[str] = None) -> None:
    if out:
        LOGGER.info("writing output to <%s>", out)
        with open(out, "w", encoding="utf-8") as file:
            file.write(body)
    else:
        sys.stdout.write(body)


def cmd_calibrate(args: argparse.Namespace, cfg: RunConfig) -> int:
    """membership functions from calibration samples"""

    samples = load_calibration_samples(args.samples)
    if not samples:
        raise ValidationError(f"no samples in <{args.samples}>")

    membership = calibrate(samples)
    rows = calibration_diagnostics(samples)
    diagnostics = pd.DataFrame(
        rows, columns=["category", "kind", "term", "n", "a", "b", "q2", "c", "d"]
    )

    if not args.out:
        # stdout carries the membership file, the diagnostics go to stderr
        _emit(dumps_json(membership.to_dict()))
        sys.stderr.write(diagnostics.to_string(index=False) + "\n")
        return EXIT_OK

    dump_json(membership.to_dict(), args.out)
    if cfg.output_format == "json":
        _emit(dumps_json(rows))
    elif cfg.output_format == "csv":
        _emit(diagnostics.to_csv(index=False))
    else:
        _emit(diagnostics.to_string(index=False) + "\n")
    return EXIT_OK


def cmd_weights(args: argparse.Namespace, cfg: RunConfig) -> int:
    """catalog weights fragment from survey votes"""

    records = load_votes(args.votes, default_category=args.category)
    for warning in validate_votes(records):
        LOGGER.warning(warning)
    _emit(dumps_json(catalog_fragment(records)), args.out)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, cfg: RunConfig) -> int:
    """check every configuration file and list all violations"""

    cfg.check()
    violations = []

    try:
        catalog = load_catalog(cfg.catalog)
    except ValidationError as exc:
        violations.append(f"catalog: {exc.args[0]}")
        violations.extend(f"catalog: {v}" for v in exc.violations)
    else:
        violations.extend(f"catalog: {v}" for v in validate_catalog(catalog))

    try:
        membership = load_membership(cfg.membership)
    except ValidationError as exc:
        membership = None
        violations.append(f"membership: {exc.args[0]}")
        violations.extend(f"membership: {v}" for v in exc.violations)

    rules = load_rule_base(cfg.rules)
    if membership is not None:
        violations.extend(f"rules: {v}" for v in validate_rule_base(rules, membership))

    if cfg.poi_db:
        db = load_poi_database(cfg.poi_db)
        if not db.is_registered:
            violations.append("POI database: home and work locations are not registered")

    if violations:
        _emit("".join(f"{v}\n" for v in violations), args.out)
        return EXIT_INVALID

    _emit("configuration is valid\n", args.out)
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace, cfg: RunConfig) -> int:
    """breakdown and recommendation of a day log or a GPS trace"""

    cfg.check()
    analyzer = LifestyleAnalyzer.from_files(
        catalog=cfg.catalog,
        membership=cfg.membership,
        rules=cfg.rules,
        fragments=args.fragment,
    )

    if format_from_path(args.input) == "csv":
        cfg.check("poi_db")
        db = load_poi_database(cfg.poi_db)
        fractions, weights = (
            load_allocation(cfg.allocation) if cfg.allocation else ({}, {})
        )
        resolver = (
            NearbySearchResolver(
                cfg.nearby_url,
                registered_home=db.registered_home,
                registered_work=db.registered_work,
            )
            if cfg.nearby_url
            else None
        )
        result = analyzer.analyze_trace(
            load_trace(args.input),
            db,
            cfg.params,
            allocation=fractions,
            home_weights=weights,
            resolver=resolver,
        )
    else:
        result = analyzer.analyze(load_day_log(args.input))

    if cfg.output_format == "json":
        body = dumps_json(result.to_dict())
    elif cfg.output_format == "csv":
        body = result.to_csv()
    else:
        body = result.to_table()

    _emit(body, args.out)
    return EXIT_OK


def cmd_recommend(args: argparse.Namespace, cfg: RunConfig) -> int:
    """recommendation for a precomputed breakdown"""

    cfg.check("membership", "rules")
    data = require_mapping(load_json(args.breakdown), "breakdown")
    bd = CategoryBreakdown.from_dict(data.get("breakdown", data))
    report = recommend(bd, load_membership(cfg.membership), load_rule_base(cfg.rules))

    if cfg.output_format == "json":
        body = dumps_json(report.to_dict())
    elif cfg.output_format == "csv":
        body = report.to_frame().to_csv(index=False)
    else:
        body = report.to_frame().to_string(index=False) + "\n"
        body += f"\nrecommendation: {report.chosen_rule.text}\n"
        if report.warning:
            body += "warning: no rule matches this day\n"

    _emit(body, args.out)
    return EXIT_OK


def cmd_plot_mf(args: argparse.Namespace, cfg: RunConfig) -> int:
    """CSV samples of every term of one linguistic variable"""

    cfg.check("membership")
    xs, degrees = load_membership(cfg.membership).curve(
        args.category, args.kind, resolution=args.resolution
    )
    frame = pd.DataFrame({"x": xs, **degrees})
    _emit(frame.to_csv(index=False), args.out)
    return EXIT_OK


COMMANDS = {
    "calibrate": cmd_calibrate,
    "weights": cmd_weights,
    "validate": cmd_validate,
    "analyze": cmd_analyze,
    "recommend": cmd_recommend,
    "plot-mf": cmd_plot_mf,
}


def main(argv: Optional[List[str]] = None) -> int:
    """run a command and return its exit code"""

    try:
        args = _parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID

    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose > 0 else logging.INFO,
        format="%(asctime)s %(levelname)-8.8s [%(name)s:%(lineno)s] %(message)s",
    )

    LOGGER.debug(args)

    try:
        cfg = _run_config(args)
        return COMMANDS[args.command](args, cfg)
    except (ValidationError, FileNotFoundError) as exc:
        LOGGER.error("%s failed", args.command)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception:
        LOGGER.exception("unexpected error while running <%s>", args.command)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
