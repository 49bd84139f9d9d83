"""Tests for rule scoring and recommendation selection."""

import logging

import pytest

from conftest import CHOSEN_TEXT, EXPECTED_RHO

from lifestyle_analyzer.core import CATEGORIES, CategoryBreakdown, breakdown
from lifestyle_analyzer.inference import (
    Attribute,
    Recommendation,
    RuleBase,
    attribute_membership,
    recommend,
    rule_base_from_dict,
    rule_base_to_dict,
    rule_score,
    validate_rule_base,
)
from lifestyle_analyzer.membership import all_slots
from lifestyle_analyzer.utils import ValidationError


def rule(rule_id, *attributes, text=None):
    return Recommendation(
        id=rule_id,
        text=text or f"text of {rule_id}",
        attributes=tuple(Attribute(*attr) for attr in attributes),
    )


class TestRuleScore:
    def test_published_degrees(self):
        assert rule_score([1, 0.8, 1, 1]) == 0.95
        assert rule_score([0, 0, 0, 0]) == 0.0
        assert rule_score([1, 0.7]) == 0.85
        assert rule_score([1, 0.8]) == 0.9

    def test_invalid(self):
        with pytest.raises(ValidationError):
            rule_score([])
        with pytest.raises(ValidationError):
            rule_score([0.5, 1.2])
        with pytest.raises(ValidationError):
            rule_score([-0.1])


class TestExample:
    def test_recommendation(self, day_log, catalog, membership, rules):
        report = recommend(breakdown(day_log, catalog), membership, rules)
        assert report.scores() == pytest.approx(EXPECTED_RHO)
        assert report.chosen == "R1"
        assert report.chosen_rule.text == CHOSEN_TEXT
        assert not report.warning
        assert [row.id for row in report.rows] == ["R1", "R4", "R3", "R2"]

    def test_degrees(self, day_log, catalog, membership, rules):
        report = recommend(breakdown(day_log, catalog), membership, rules)
        degrees = {row.id: row.degrees for row in report.rows}
        assert degrees["R1"] == pytest.approx((1, 0.8, 1, 1))
        assert degrees["R2"] == pytest.approx((0, 0, 0, 0))
        assert degrees["R3"] == pytest.approx((1, 0.7))
        assert degrees["R4"] == pytest.approx((1, 0.8))

    def test_ideal_health_score_at_17(self, membership):
        bd = CategoryBreakdown(times={"health": 0.5}, scores={"health": 17})
        degree = attribute_membership(
            bd, membership, Attribute("health", "score", "ideal_score")
        )
        assert degree == pytest.approx(0.310, abs=0.001)

    def test_report_output(self, day_log, catalog, membership, rules):
        report = recommend(breakdown(day_log, catalog), membership, rules)

        data = report.to_dict()
        assert data["chosen"] == "R1"
        assert data["chosen_text"] == CHOSEN_TEXT
        assert data["warning"] is False
        assert data["rules"][0]["attributes"][0] == "K_leisure=hectic"
        assert data["rules"][0]["attributes"][1] == "M_leisure=low_score"

        frame = report.to_frame()
        assert list(frame.columns) == ["id", "text", "mu", "rho", "chosen"]
        assert frame["chosen"].tolist() == ["*", "", "", ""]
        assert frame["mu"][0] == "{1.000, 0.800, 1.000, 1.000}"


class TestSelection:
    def test_ties_go_to_the_earlier_rule(self, membership):
        rules = RuleBase(
            (
                rule("A", ("health", "time", "fit")),
                rule("B", ("health", "time", "fit")),
            )
        )
        bd = CategoryBreakdown(times={"health": 2.5})
        report = recommend(bd, membership, rules)
        assert report.chosen == "A"
        assert [row.id for row in report.rows] == ["A", "B"]

    def test_no_match_still_emits(self, membership, rules, caplog):
        with caplog.at_level(logging.WARNING):
            report = recommend(
                CategoryBreakdown(times={"work": 7}, scores={"work": 300}),
                membership,
                RuleBase((rule("A", ("work", "time", "lethargic")),)),
            )
        assert report.chosen == "A"
        assert report.warning
        assert "no rule matches" in caplog.text

    def test_empty_day(self, membership, rules):
        report = recommend(CategoryBreakdown(), membership, rules)
        assert report.chosen in {r.id for r in rules}
        assert all(0 <= row.rho <= 1 for row in report.rows)

    def test_unresolvable_attribute(self, membership):
        rules = RuleBase((rule("A", ("health", "time", "athletic")),))
        assert len(validate_rule_base(rules, membership)) == 1
        with pytest.raises(ValidationError):
            recommend(CategoryBreakdown(), membership, rules)

    def test_plain_rule_list(self, membership):
        report = recommend(
            CategoryBreakdown(times={"health": 2.5}),
            membership,
            [rule("A", ("health", "time", "unfit")), rule("B", ("health", "time", "fit"))],
        )
        assert report.chosen == "B"


class TestRuleBase:
    def test_invalid(self):
        with pytest.raises(ValidationError):
            RuleBase(())
        with pytest.raises(ValidationError):
            RuleBase((rule("A", ("work", "time", "lethargic")),) * 2)
        with pytest.raises(ValidationError):
            Recommendation(id="A", text="nothing", attributes=())
        with pytest.raises(ValidationError):
            Attribute("sleep", "time", "long")

    def test_round_trip(self, rules):
        assert rule_base_from_dict(rule_base_to_dict(rules)) == rules

    def test_alias_resolved(self, rules):
        assert rules.rules[0].attributes[1] == Attribute("leisure", "score", "low_score")

    def test_missing_id(self):
        with pytest.raises(ValidationError):
            rule_base_from_dict(
                {"rules": [{"text": "x", "attributes": [{"category": "work"}]}]}
            )


SLOTS = all_slots()


def random_breakdown(rng):
    return CategoryBreakdown(
        times={cat: float(rng.uniform(0, 16)) for cat in CATEGORIES},
        scores={cat: float(rng.uniform(-100, 900)) for cat in CATEGORIES},
    )


def random_rules(rng):
    rules = []
    for index in range(rng.integers(1, 6)):
        attributes = [SLOTS[rng.integers(len(SLOTS))] for _ in range(rng.integers(1, 7))]
        rules.append(rule(f"R{index}", *attributes))
    return rules


class TestProperties:
    def test_mean_matches_brute_force(self, rng, membership):
        for _ in range(300):
            bd = random_breakdown(rng)
            rules = random_rules(rng)
            report = recommend(bd, membership, rules)
            rows = {row.id: row for row in report.rows}

            best = None
            for r in rules:
                degrees = []
                for attr in r.attributes:
                    a, b, c, d = membership.mf(attr.category, attr.kind, attr.term).params
                    x = bd.crisp(attr.category, attr.kind)
                    rise = 1.0 if b == a else min(max((x - a) / (b - a), 0), 1)
                    if b == a and x < a:
                        rise = 0.0
                    fall = 1.0 if d == c else min(max((d - x) / (d - c), 0), 1)
                    if d == c and x > d:
                        fall = 0.0
                    degrees.append(min(rise, fall))
                expected = sum(degrees) / len(degrees)
                assert rows[r.id].rho == pytest.approx(expected, abs=1e-12)
                if best is None or expected > best[1] + 1e-12:
                    best = (r.id, expected)

            assert report.chosen_rule.rho == pytest.approx(best[1], abs=1e-12)
            assert report.chosen_rule.rho == max(row.rho for row in report.rows)

    def test_permutation_invariance(self, rng, membership):
        for _ in range(300):
            bd = random_breakdown(rng)
            rules = random_rules(rng)
            report = recommend(bd, membership, rules)
            shuffled = [rules[i] for i in rng.permutation(len(rules))]
            again = recommend(bd, membership, shuffled)

            assert again.chosen_rule.rho == report.chosen_rule.rho
            assert again.scores() == report.scores()
            top = [row.id for row in report.rows if row.rho == report.chosen_rule.rho]
            if len(top) == 1:
                assert again.chosen == report.chosen
            else:
                assert again.chosen in top
