"""Generation fixtures, inverse matching, and inversion over the fixture list."""

import pytest

from kinmorph.errors import ParseError
from kinmorph.rewrite import Rewriter, parse_rules


@pytest.fixture(scope="session")
def rewriter(analyzer):
    return analyzer.rewriter


class TestToSurface:
    def test_infinitive(self, rewriter):
        assert rewriter.to_surface(["ku", "som", "a"]) == "gusoma"

    def test_perfective_palatalization(self, rewriter):
        assert rewriter.to_surface(["n", "a", "rot", "ye"]) == "narose"

    def test_passive_perfective(self, rewriter):
        assert rewriter.to_surface(["ki", "a", "som", "w", "ye"]) == "cyasomwe"

    def test_all_fixture_pairs(self, rewriter, fixture_pairs):
        for deep, surface, gloss in fixture_pairs:
            assert rewriter.to_surface(deep) == surface, gloss

    def test_unmatched_boundaries_concatenate(self, rewriter):
        assert rewriter.to_surface(["ba", "som", "a"]) == "basoma"

    def test_deterministic(self, rewriter, fixture_pairs):
        for deep, surface, _ in fixture_pairs:
            assert rewriter.to_surface(deep) == rewriter.to_surface(deep)


class TestFromSurfaceMatches:
    def test_voiced_prefix(self, rewriter):
        assert rewriter.from_surface_matches("gusoma", "ku", 0) == {(2, "ku_gu")}

    def test_identity_realization(self, rewriter):
        assert rewriter.from_surface_matches("gusoma", "som", 2) == {(3, None)}

    def test_consumed_following_y(self, rewriter):
        matches = rewriter.from_surface_matches("narose", "rot", 2)
        assert matches == {(3, "t_y_s")}
        rich = rewriter.match_morpheme("narose", "rot", 2)
        assert len(rich) == 1 and rich[0].pending.consumed == "y"

    def test_no_match_is_empty(self, rewriter):
        assert rewriter.from_surface_matches("gusoma", "ba", 0) == set()


class TestRuleFile:
    def test_every_rule_consumes_deep_material(self, analyzer):
        for rule in analyzer.rules.rules:
            assert len(rule.tail) + len(rule.head) >= 1

    def test_rejects_empty_lhs(self):
        with pytest.raises(ParseError):
            parse_rules("+ -> x\n")

    def test_rejects_missing_arrow(self):
        with pytest.raises(ParseError):
            parse_rules("a+b\n")

    def test_mode_parsing(self):
        table = parse_rules("a+ -> + [right:^x] [gen]\n")
        assert table.rules[0].gen_enabled() and not table.rules[0].ana_enabled()


def _chain_match(rewriter, surface, deep):
    """Depth-first proof that the deep sequence realizes the surface."""
    from kinmorph.morphotactics import STEM_SLOT

    def step(i, pos, pending):
        if i == len(deep):
            return pos == len(surface) and pending is None
        form, slot = deep[i]
        if slot == STEM_SLOT:
            options = [
                (consumed, pend)
                for stem, consumed, _, pend in rewriter.stem_matches(surface, pos, pending)
                if stem == form
            ]
        else:
            options = [
                (m.consumed, m.pending)
                for m in rewriter.match_morpheme(surface, form, pos, slot, pending)
            ]
        return any(step(i + 1, pos + consumed, pend) for consumed, pend in options)

    return step(0, 0, None)


class TestInversion:
    def test_fixture_list_recovered(self, rewriter, analyzer, fixture_pairs):
        from kinmorph.rewrite import infer_slot_assignment

        for deep, surface, gloss in fixture_pairs:
            pairs = [(item, None) if isinstance(item, str) else item for item in deep]
            assigned = infer_slot_assignment(analyzer.inventory, pairs)
            assert _chain_match(rewriter, surface, assigned), gloss

    def test_raw_analyses_contain_fixture_sequences(self, analyzer, fixture_pairs):
        from kinmorph.rewrite import infer_slot_assignment

        for deep, surface, gloss in fixture_pairs:
            pairs = [(item, None) if isinstance(item, str) else item for item in deep]
            assigned = tuple(
                (slot, form) for form, slot in infer_slot_assignment(analyzer.inventory, pairs)
            )
            raw = {
                tuple((sid, form) for sid, form, _, _ in cand)
                for cand in analyzer.analyze_raw(surface)
            }
            assert assigned in raw, gloss
