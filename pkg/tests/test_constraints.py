"""Constraint DSL: parsing, evaluation, filtering, oracle equivalence."""

import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinmorph.constraints import (
    ConstraintRule,
    filter_segmentations,
    parse_rule,
    satisfies,
)
from kinmorph.errors import ParseError
from kinmorph.segmentation import Segmentation

PAPER_RULES = [
    "{V;NEG;ta} => {!V;PRE_IN;nti}",
    "{V;PRE_IN;si} => {V;SUBJ;n}",
    "{V;STEM;#1} => {V;STEM;/^[hzcvrz]$/}",
    "{V;STEM;/^gamij$/} => {V;ASP;e}",
]


def seg(*entries):
    return Segmentation(surface="", entries=tuple(entries))


class TestParseRule:
    def test_double_negation_rule(self):
        rule = parse_rule(PAPER_RULES[0])
        assert rule.antecedent.slot == "NEG" and rule.antecedent.value == "ta"
        assert rule.consequent.negated and rule.consequent.slot == "PRE-IN"

    def test_si_rule(self):
        rule = parse_rule(PAPER_RULES[1])
        assert not rule.antecedent.negated
        assert rule.consequent.slot == "SUBJ" and rule.consequent.value == "n"

    def test_regex_antecedent(self):
        rule = parse_rule(PAPER_RULES[3])
        assert rule.antecedent.kind == "regex"
        assert rule.antecedent.matches_value("gamij")
        assert not rule.antecedent.matches_value("gamija")

    def test_length_pattern(self):
        rule = parse_rule(PAPER_RULES[2])
        assert rule.antecedent.kind == "length" and rule.antecedent.length == 1

    def test_render_roundtrip_on_paper_rules(self):
        for text in PAPER_RULES:
            rule = parse_rule(text)
            again = parse_rule(rule.render())
            assert again == rule
            assert rule.render() == parse_rule(rule.render()).render()

    def test_malformed_reports_column(self):
        with pytest.raises(ParseError):
            parse_rule("{V;NEG;ta} => {V;PRE_IN}")
        with pytest.raises(ParseError):
            parse_rule("{V;NEG;ta} {V;X;y}")


class TestSatisfies:
    def test_double_negation_violated(self):
        rule = parse_rule(PAPER_RULES[0])
        s = seg((2, "nti", None), (4, "ta", None), (11, "som", None))
        assert not satisfies(s, rule)

    def test_vacuous_antecedent(self):
        rule = parse_rule(PAPER_RULES[0])
        s = seg((2, "nti", None), (11, "som", None))
        assert satisfies(s, rule)

    def test_single_character_stem_whitelist(self):
        rule = parse_rule(PAPER_RULES[2])
        assert satisfies(seg((11, "h", None)), rule)
        assert not satisfies(seg((11, "b", None)), rule)


class TestFilter:
    def test_empty_input(self):
        assert filter_segmentations([], [parse_rule(PAPER_RULES[0])]) == []

    def test_no_rules_is_identity(self):
        segs = [seg((11, "som", None)), seg((11, "kir", None))]
        assert filter_segmentations(segs, []) == segs

    def test_double_negation_pruned(self, analyzer):
        # every analysis the full analyzer emits obeys the loaded rules
        for word in ("tudasoma", "ntimwasomye"):
            for s in analyzer.analyze(word):
                forms = dict(s.slot_values())
                assert not ("nti" == forms.get("PRE-IN") and "ta" == forms.get("NEG"))

    def test_subset_order_idempotent(self):
        rules = [parse_rule(PAPER_RULES[2])]
        segs = [seg((11, "h", None)), seg((11, "b", None)), seg((11, "som", None))]
        kept = filter_segmentations(segs, rules)
        assert kept == [segs[0], segs[2]]
        assert filter_segmentations(kept, rules) == kept


# ---------------------------------------------------------------------------
# randomized oracle equivalence
# ---------------------------------------------------------------------------

SLOTS = ["PRE-IN", "SUBJ", "NEG", "TAM", "STEM", "SUFF", "ASP"]
FORMS = ["ta", "nti", "si", "n", "som", "h", "b", "ir", "y", "a", "e", "gamij"]


def oracle_satisfies(s, rule):
    """Independent interpreter: materialize both match sets explicitly."""

    def matching_values(pred):
        pairs = [(name, form) for name, form in s.slot_values()]
        out = []
        for name, form in pairs:
            if pred.pos != "V" or name != pred.slot:
                continue
            if pred.kind == "literal" and form == pred.value:
                out.append(form)
            elif pred.kind == "length" and len(form) == pred.length:
                out.append(form)
            elif pred.kind == "regex" and re.search(pred.value, form):
                out.append(form)
        return out

    def holds(pred):
        found = bool(matching_values(pred))
        return not found if pred.negated else found

    return (not holds(rule.antecedent)) or holds(rule.consequent)


@st.composite
def random_seg(draw):
    entries = [(11, draw(st.sampled_from(FORMS)), None)]
    for name, sid in (("PRE-IN", 2), ("SUBJ", 3), ("NEG", 4), ("TAM", 5), ("SUFF", 12), ("ASP", 15)):
        if draw(st.booleans()):
            entries.append((sid, draw(st.sampled_from(FORMS)), None))
    entries.sort(key=lambda e: e[0])
    return Segmentation(surface="", entries=tuple(entries))


@st.composite
def random_rule(draw):
    def pred():
        neg = "!" if draw(st.booleans()) else ""
        slot = draw(st.sampled_from(SLOTS)).replace("-", "_")
        kind = draw(st.sampled_from(["literal", "regex", "length"]))
        if kind == "literal":
            value = draw(st.sampled_from(FORMS))
        elif kind == "regex":
            value = "/" + draw(st.sampled_from(["^s", "a$", "om", "^[hzcvrz]$", "."])) + "/"
        else:
            value = "#" + str(draw(st.integers(min_value=1, max_value=5)))
        return "{%sV;%s;%s}" % (neg, slot, value)

    return parse_rule(f"{pred()} => {pred()}")


@settings(max_examples=300, deadline=None)
@given(random_seg(), random_rule())
def test_satisfies_matches_oracle(s, rule):
    assert satisfies(s, rule) == oracle_satisfies(s, rule)
