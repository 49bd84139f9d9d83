"""Tests for the HTTP nearby-search resolver against a local stub service."""

import logging

import pytest

from lifestyle_analyzer.ingest import StayPointParams, trace_to_visits
from lifestyle_analyzer.nearby import NearbySearchResolver

from test_ingest import CAFE, HOME, WORK, dwell, offset


@pytest.fixture
def resolver(nearby_server):
    url, _ = nearby_server
    return NearbySearchResolver(url, registered_home=HOME, registered_work=WORK)


class TestNearbySearch:
    def test_query_parameters(self, resolver, nearby_server):
        _, calls = nearby_server
        resolver.search(CAFE, 75)
        assert calls == [(CAFE[0], CAFE[1], 75.0)]

    def test_closest_result_wins(self, resolver):
        # the service lists the night market first, the cafe is closer
        assert resolver.nearest(offset(CAFE, 5), 75) == "cafe"
        assert resolver.nearest(offset(CAFE, 38), 75) == "restaurant"

    def test_nothing_within_radius(self, resolver):
        assert resolver.nearest((45.0, 7.0), 75) is None

    def test_priority_of_registered_places(self, resolver, nearby_server):
        _, calls = nearby_server
        assert resolver.resolve(HOME, StayPointParams()) == "home"
        assert resolver.resolve(WORK, StayPointParams()) == "work"
        assert calls == []
        assert resolver.resolve((45.0, 7.0), StayPointParams()) == "unknown"

    def test_server_error(self, resolver, caplog):
        with caplog.at_level(logging.WARNING):
            assert resolver.nearest((-1.0, 0.0), 75) is None
        assert "failed" in caplog.text

    def test_connection_error(self, caplog):
        resolver = NearbySearchResolver(
            "http://127.0.0.1:9", registered_home=HOME, registered_work=WORK, timeout=1
        )
        with caplog.at_level(logging.WARNING):
            assert resolver.resolve(CAFE, StayPointParams()) == "unknown"
        assert "failed" in caplog.text

    def test_trace_resolution(self, resolver):
        trace = dwell(CAFE, 0, 30) + dwell(HOME, 40, 100)
        visits = trace_to_visits(trace, resolver)
        assert [v.tag for v in visits] == ["cafe", "travel", "home"]

    def test_exported_by_the_package(self):
        import lifestyle_analyzer

        assert lifestyle_analyzer.NearbySearchResolver is NearbySearchResolver
