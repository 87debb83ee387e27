"""Analyzer fixtures: the two table words, soundness, features, round trips."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinmorph.errors import ParseError, ValidationError
from kinmorph.morphotactics import validate_order
from kinmorph.segmentation import Segmentation, parse, serialize

TABLE1_ROWS = [
    "- nti u/1 - za - - - mu - ibeshy - - - - - - - e ho",
    "- nti u/7 - za - - - mu - ibeshy - - - - - - - e ho",
    "- nti u/5 - za - - - mu - ibeshy - - - - - - - e ho",
    "- nti u/7 - za - - - mu ii beshy - - - - - y - e ho",
    "- nti u/1 - za - - - mu ii beshy - - - - - y - e ho",
    "- nti u/5 - za - - - mu ii beshy - - - - - y - e ho",
    "- nti u/5 - za - - - mu ii beshy - - - - - - - e ho",
    "- nti u/1 - za - - - mu ii beshy - - - - - - - e ho",
    "- nti u/7 - za - - - mu ii beshy - - - - - - - e ho",
    "- nti u/1 - za - - - mu ii besh - - - - - y - e ho",
    "- nti u/5 - za - - - mu ii besh - - - - - y - e ho",
    "- nti u/7 - za - - - mu ii besh - - - - - y - e ho",
    "- nti u/1 - za - - - mu - ibeshy - - - - - y - e ho",
    "- nti u/5 - za - - - mu - ibeshy - - - - - y - e ho",
    "- nti u/7 - za - - - mu - ibeshy - - - - - y - e ho",
]

TABLE3_ROWS = {
    "- - ka - - - - - tu - ik - - ir - - - w a -": {1, 5, 17, 24, 26},
    "- - ka - - - - - tu ii kir - - - - - - w a -": {1, 5, 8, 24},
    "- - ka - - - - - - - twik - - ir - - - w a -": {1, 17, 24, 26},
    "- - ka - - - - - - - twikirw - - - - - y - a -": {1, 23},
    "- - ka - - - - - - - twikirw - - - - - - - a -": {1},
    "- - ka - - - - - - - twikir - - - - - - w a -": {1, 24},
}


class TestTableFixtures:
    def test_table1_exact(self, analyzer):
        segs = analyzer.analyze("ntuzamwibeshyeho")
        assert {serialize(s) for s in segs} == set(TABLE1_ROWS)
        assert len(segs) == 15

    def test_table3_exact_with_indicator_sets(self, analyzer):
        segs = analyzer.analyze("gatwikirwa")
        got = {serialize(s): set(analyzer.indicator_features(s)) for s in segs}
        assert got == TABLE3_ROWS

    def test_non_verb_yields_nothing(self, analyzer):
        assert analyzer.analyze("xyz") == []

    def test_deterministic_ordering(self, analyzer):
        first = [serialize(s) for s in analyzer.analyze("gatwikirwa")]
        second = [serialize(s) for s in analyzer.analyze("gatwikirwa")]
        assert first == second == sorted(first)


class TestGenerate:
    def test_infinitive(self, analyzer):
        seg = Segmentation(surface="", entries=((3, "ku", None), (11, "som", None), (15, "a", None)))
        assert analyzer.generate(seg) == "gusoma"

    def test_reflexive_applicative(self, analyzer):
        seg = Segmentation(
            surface="",
            entries=((3, "a", None), (10, "ii", None), (11, "som", None), (12, "ir", None), (15, "aga", None)),
        )
        assert analyzer.generate(seg) == "yisomeraga"

    def test_invalid_rejected(self, analyzer):
        seg = Segmentation(surface="", entries=((3, "xx", None), (11, "som", None)))
        with pytest.raises(ValidationError):
            analyzer.generate(seg)

    def test_roundtrip_over_sample_words(self, analyzer, fixture_pairs):
        words = sorted({surface for _, surface, _ in fixture_pairs})
        for word in words:
            for seg in analyzer.analyze(word):
                assert analyzer.generate(seg) == word


class TestSoundness:
    def test_outputs_validate_and_satisfy_rules(self, analyzer, fixture_pairs):
        from kinmorph.constraints import satisfies

        for _, word, _ in fixture_pairs:
            for seg in analyzer.analyze(word):
                seq = [(sid, form) for sid, form, _ in seg.entries]
                assert validate_order(analyzer.inventory, seq)
                assert all(satisfies(seg, r) for r in analyzer.constraints)


class TestInflectionSet:
    def test_twik_defaults(self, analyzer):
        words = analyzer.inflection_set("twik")
        assert "gutwika" in words and "uzatwika" in words

    def test_ik_defaults(self, analyzer):
        words = analyzer.inflection_set("ik")
        assert "kwika" in words and "turitse" in words

    def test_rejecting_vocab_empty(self, analyzer):
        assert analyzer.inflection_set("twik", vocab=lambda w: False) == []

    def test_cap(self, analyzer):
        assert len(analyzer.inflection_set("som", cap=3)) == 3

    def test_lemmas_match_annotator_list(self, analyzer):
        lemmas = [analyzer.lemma(s) for s in ("ik", "kir", "twik", "twikirw", "twikir")]
        assert lemmas == ["kwika", "gukira", "gutwika", "gutwikirwa", "gutwikira"]


class TestIndicatorFeatures:
    def test_bit_implications_on_corpus(self, analyzer, fixture_pairs):
        for _, word, _ in fixture_pairs:
            for seg in analyzer.analyze(word):
                bits = analyzer.indicator_features(seg)
                if 26 in bits:
                    assert 17 in bits and 24 in bits
                if 39 in bits:
                    assert 38 in bits
                assert (1 in bits) != (2 in bits)

    def test_ni_imperative_vs_conditional(self, analyzer):
        imp = analyzer.analyze("nimusome")
        cond = analyzer.analyze("nimusoma")
        assert any(40 in analyzer.indicator_features(s) for s in imp)
        assert all(41 not in analyzer.indicator_features(s) for s in imp)
        assert any(41 in analyzer.indicator_features(s) for s in cond)


class TestSerialization:
    def test_table1_row_roundtrip(self, analyzer):
        row = TABLE1_ROWS[0]
        seg = parse(row, surface="ntuzamwibeshyeho")
        assert serialize(seg) == row

    def test_minimal_row(self):
        seg = Segmentation(surface="", entries=((11, "som", None), (15, "a", None)))
        assert serialize(seg) == "- - - - - - - - - - som - - - - - - - a -"

    def test_wrong_arity_rejected(self):
        with pytest.raises(ParseError):
            parse("- " * 19)

    def test_parse_serialize_identity(self, analyzer):
        for word in ("gatwikirwa", "ntuzamwibeshyeho"):
            for seg in analyzer.analyze(word):
                text = serialize(seg)
                assert serialize(parse(text, surface=word)) == text


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_random_valid_deep_sequences_are_recovered(analyzer, data):
    """analyze_raw inverts to_surface for machine-built deep sequences."""
    inv = analyzer.inventory
    deep = []
    if data.draw(st.booleans()):
        deep.append((data.draw(st.sampled_from(inv.forms("PRE-IN"))), 2))
    subj = data.draw(st.sampled_from(inv.lookup("SUBJ")))
    deep.append((subj.form, 3))
    if data.draw(st.booleans()):
        deep.append((data.draw(st.sampled_from(inv.forms("TAM"))), 5))
    stem = data.draw(st.sampled_from(["som", "kir", "twik", "rot", "gor", "vug", "bar"]))
    deep.append((stem, 11))
    if data.draw(st.booleans()):
        deep.append((data.draw(st.sampled_from(inv.forms("SUFF"))), 12))
    deep.append((data.draw(st.sampled_from(["a", "e", "aga"])), 15))
    surface = analyzer.rewriter.to_surface(deep)
    raw = {
        tuple((sid, form) for sid, form, _, _ in cand)
        for cand in analyzer.analyze_raw(surface)
    }
    assert tuple((sid, form) for form, sid in deep) in raw
