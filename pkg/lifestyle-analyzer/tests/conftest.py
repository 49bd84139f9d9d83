"""Shared fixtures: example experiment files and a nearby-search stub server."""

import math
import os
import threading
from pathlib import Path

import numpy as np
import pytest
from flask import Flask, jsonify, request
from werkzeug.serving import make_server

from lifestyle_analyzer.core import load_catalog, load_day_log
from lifestyle_analyzer.geo import haversine
from lifestyle_analyzer.inference import load_rule_base
from lifestyle_analyzer.membership import load_membership

EXPERIMENT_DIR = Path(__file__).resolve().parent.parent / "data" / "paper-experiment"

# K and M of the example day, per category
EXPECTED_TIMES = {"social": 1.5, "leisure": 6.5, "other": 3.5, "work": 12, "health": 0.5}
EXPECTED_SCORES = {"social": 35, "leisure": 195, "other": 39, "work": 440, "health": 10}
EXPECTED_RHO = {"R1": 0.95, "R2": 0.0, "R3": 0.85, "R4": 0.9}
CHOSEN_TEXT = "Catch up a movie this evening."


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in list(os.environ):
        if name.startswith("LIFESTYLE_"):
            monkeypatch.delenv(name)


@pytest.fixture
def experiment_dir():
    return EXPERIMENT_DIR


@pytest.fixture
def experiment_file():
    def _file(name):
        return str(EXPERIMENT_DIR / name)

    return _file


@pytest.fixture
def catalog():
    return load_catalog(EXPERIMENT_DIR / "catalog.json")


@pytest.fixture
def membership():
    return load_membership(EXPERIMENT_DIR / "membership.json")


@pytest.fixture
def rules():
    return load_rule_base(EXPERIMENT_DIR / "rules.json")


@pytest.fixture
def day_log():
    return load_day_log(EXPERIMENT_DIR / "day-log.json")


@pytest.fixture
def rng():
    return np.random.default_rng(20230315)


NEARBY_PLACES = (
    {"name": "City Gym", "tag": "gym", "lat": 23.05, "lon": 120.25},
    {"name": "Corner Cafe", "tag": "cafe", "lat": 23.02, "lon": 120.21},
    {"name": "Night Market", "tag": "restaurant", "lat": 23.0203, "lon": 120.2103},
)


def _nearby_app():
    app = Flask(__name__)
    app.config["calls"] = []

    @app.route("/nearby")
    def nearby():
        lat = float(request.args["lat"])
        lon = float(request.args["lon"])
        radius = float(request.args["radius"])
        app.config["calls"].append((lat, lon, radius))
        if math.isclose(lat, -1.0):
            return jsonify({"error": "boom"}), 500
        results = [
            place
            for place in NEARBY_PLACES
            if haversine((lat, lon), (place["lat"], place["lon"])) <= radius
        ]
        # the service ranks by name, not by distance
        return jsonify({"results": sorted(results, key=lambda p: p["name"], reverse=True)})

    return app


@pytest.fixture
def nearby_server():
    """base URL and call log of a local nearby-search service"""

    app = _nearby_app()
    server = make_server("127.0.0.1", 0, app)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_port}", app.config["calls"]
    finally:
        server.shutdown()
        thread.join(timeout=5)
