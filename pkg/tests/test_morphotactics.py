"""Inventory loading and slot-order validation."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinmorph.errors import ParseError, ValidationError
from kinmorph.morphotactics import (
    STEM_SLOT,
    load_inventory,
    next_slots,
    slot_id_for_name,
    validate_order,
)

TABLE_SUBJECTS = "n u tu mu a u ba u i ri a ki bi i zi ru ka tu bu ku ha ku mi".split()


class TestLoadInventory:
    def test_shipped_subject_multiset(self, inventory):
        assert inventory.forms("SUBJ") == TABLE_SUBJECTS

    def test_neg_slot_single_morpheme(self, inventory):
        assert inventory.forms("NEG") == ["ta"]

    def test_missing_stem_slot_rejected(self):
        source = "3\tSUBJ\tku\t-\t-\n"
        with pytest.raises(ValidationError, match="missing slots"):
            load_inventory(source)

    def test_duplicate_morpheme_rejected(self):
        source = (
            "\n".join(f"{i}\t{name}\t-\t-\t-" for i, name in [
                (1, "N-AUG"), (2, "PRE-IN"), (4, "NEG"), (5, "TAM"), (6, "NA-EMPH"),
                (7, "OBJ3"), (8, "OBJ2"), (9, "OBJ1"), (10, "REFL"), (11, "STEM"),
                (12, "SUFF"), (13, "SUFF"), (14, "P-SUFF"), (15, "ASP"), (16, "LOC-P"),
            ])
            + "\n3\tSUBJ\tku\t-\t-\n3\tSUBJ\tku\t-\t-\n"
        )
        with pytest.raises(ValidationError, match="duplicate"):
            load_inventory(source)

    def test_malformed_line_reports_line_number(self):
        with pytest.raises(ParseError, match="line 2"):
            load_inventory("11\tSTEM\t-\t-\t-\nbogus line without tabs\n")

    def test_roundtrip(self, inventory):
        again = load_inventory(inventory.serialize())
        assert again.suffix_columns == inventory.suffix_columns
        assert [m.key() for m in again.morphemes] == [m.key() for m in inventory.morphemes]


class TestNextSlots:
    def test_empty_reaches_everything(self, inventory):
        out = next_slots(inventory, [])
        assert {1, 2, 3, STEM_SLOT} <= out
        assert out == set(range(1, 17))

    def test_after_stem_and_passive(self, inventory):
        out = next_slots(inventory, [slot_id_for_name("STEM"), slot_id_for_name("P-SUFF")])
        assert out == {15, 16}
        assert 12 not in out and 13 not in out

    def test_saturated(self, inventory):
        assert next_slots(inventory, list(range(1, 17))) == set()

    def test_suffix_repeats_until_cap(self, inventory):
        assert 12 in next_slots(inventory, [11, 12])
        filled = [11] + [12] * inventory.suffix_columns
        assert 12 not in next_slots(inventory, filled)


class TestValidateOrder:
    def test_infinitive(self, inventory):
        assert validate_order(inventory, [(3, "ku"), (11, "som"), (15, "a")])

    def test_stem_before_subject_rejected(self, inventory):
        assert not validate_order(inventory, [(11, "som"), (3, "ku")])

    def test_tam_sequence(self, inventory):
        assert validate_order(
            inventory, [(3, "ba"), (5, "racya"), (11, "som"), (15, "a")]
        )

    def test_two_stems_rejected(self, inventory):
        assert not validate_order(inventory, [(11, "som"), (11, "kir")])

    def test_unknown_form_rejected(self, inventory):
        assert not validate_order(inventory, [(3, "xx"), (11, "som")])

    def test_all_table_examples_accepted(self, inventory, fixture_pairs):
        for deep, surface, _ in fixture_pairs:
            seq = [(slot, form) for form, slot in _with_slots(deep)]
            assert validate_order(inventory, seq), surface


def _with_slots(deep):
    from kinmorph.rewrite import infer_slot_assignment
    from kinmorph.analyzer import Analyzer

    inv = Analyzer().inventory
    pairs = [(item, None) if isinstance(item, str) else item for item in deep]
    return infer_slot_assignment(inv, pairs)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_next_slots_agrees_with_validate_order(data):
    from kinmorph.analyzer import Analyzer

    inv = Analyzer().inventory
    filled = []
    seq = []
    for _ in range(data.draw(st.integers(min_value=1, max_value=8))):
        options = [
            sid
            for sid in sorted(next_slots(inv, filled))
            if sid == STEM_SLOT or inv.forms("SUFF" if sid in (12, 13) else sid)
        ]
        if not options:
            break
        sid = data.draw(st.sampled_from(options))
        if sid == STEM_SLOT:
            forms = ["som"]
        elif sid in (12, 13):
            forms = inv.forms("SUFF")
        else:
            forms = inv.forms(sid)
        seq.append((sid, data.draw(st.sampled_from(forms))))
        filled.append(sid)
    if not any(s == STEM_SLOT for s, _ in seq):
        seq.append((STEM_SLOT, "som"))
        seq.sort(key=lambda p: p[0])
    assert validate_order(inv, seq)
