"""Segmentations: 20-column slot assignments plus their indicator features."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import ParseError, ValidationError
from .morphotactics import SLOT_NAMES, STEM_SLOT, SUFF_SLOTS

#: serialized column -> slot id (SUFF spans 6 columns)
COLUMN_SLOT = {}
for _c in range(1, 12):
    COLUMN_SLOT[_c] = _c
for _c in range(12, 18):
    COLUMN_SLOT[_c] = 12
COLUMN_SLOT[18] = 14
COLUMN_SLOT[19] = 15
COLUMN_SLOT[20] = 16

DEFAULT_SUFFIX_COLUMN = {
    "ik": 12, "ur": 12, "uk": 13, "an": 13, "ir": 14, "ish": 15, "iz": 16, "y": 17,
}

INDICATOR_KEYS = {
    1: "with_subjects", 2: "missing_subj", 3: "with_human_subjects",
    4: "with_location_subjects", 5: "with_objects", 6: "with_human_objects",
    7: "with_location_objects", 8: "trans_any_refl", 9: "trans_any_obj3",
    10: "trans_any_obj23", 11: "trans_any_obj123", 12: "obj2_obj3_suff",
    13: "obj3_suff", 14: "obj2_obj3_refl_suff", 15: "obj3_refl_suff",
    16: "suff_ish", 17: "suff_ir", 18: "suff_iz", 19: "suff_an",
    20: "suff_ik", 21: "suff_uk", 22: "suff_ur", 23: "suff_y", 24: "suff_w",
    25: "suff_ir_y", 26: "suff_ir_w", 27: "suff_an_y", 28: "suff_iz_y",
    29: "suff_y_w", 30: "post_suff", 31: "mg_rule_r_y_none",
    32: "mg_rule_r_y_z", 33: "obj3_ka_ku", 34: "suff_ish_ish",
    35: "suff_ir_ir", 36: "comb_obj3_suff_w", 37: "with_nloc_obj_no_suf",
    38: "suff1_suff2", 39: "suff1_suff2_suff3", 40: "ni_imperative",
    41: "ni_conditional", 42: "mg_rule_t_y_s", 43: "mg_rule_t_y_sh",
    44: "suff_an_ir", 45: "suff_ur_y", 46: "suff_ur_w", 47: "suff_uk_y",
}

_RULE_FEATURE = {"r_y_none": 31, "r_y_z": 32, "t_y_s": 42, "t_y_sh": 43}


@dataclass(frozen=True)
class Segmentation:
    """One complete analysis of a surface word.

    ``entries`` is the ordered (slot id, deep form, class id) list;
    ``applied_rules`` the morphographemic rules its realization used.
    """

    surface: str
    entries: tuple  # ((slot_id, form, class_id), ...)
    applied_rules: frozenset = frozenset()

    def __post_init__(self):
        if not any(sid == STEM_SLOT for sid, _, _ in self.entries):
            raise ValidationError("segmentation has no stem")

    @property
    def stem(self) -> str:
        for sid, form, _ in self.entries:
            if sid == STEM_SLOT:
                return form
        raise AssertionError

    def slot_values(self):
        """(slot name, deep form) pairs for every filled column."""
        return [(SLOT_NAMES[sid], form) for sid, form, _ in self.entries]

    def forms_in(self, slot_name: str):
        return [form for name, form in self.slot_values() if name == slot_name]

    def entry_in(self, slot_name: str):
        for sid, form, cid in self.entries:
            if SLOT_NAMES[sid] == slot_name:
                return (form, cid)
        return None

    def key(self):
        return self.entries

    def columns(self) -> list[str]:
        """Materialize the 20-token column view ("-" marks empty)."""
        cols = ["-"] * (20 + 1)  # 1-based
        next_suffix = 12
        for sid, form, cid in self.entries:
            token = form if cid is None else f"{form}/{cid}"
            if sid in SUFF_SLOTS:
                col = max(DEFAULT_SUFFIX_COLUMN.get(form, 12), next_suffix)
                if col > 17:
                    col = next_suffix if next_suffix <= 17 else 17
                cols[col] = token
                next_suffix = col + 1
            elif sid == 14:
                cols[18] = token
            elif sid == 15:
                cols[19] = token
            elif sid == 16:
                cols[20] = token
            else:
                cols[sid] = token
        return cols[1:]


def serialize(seg: Segmentation) -> str:
    """20 space-separated tokens; SUBJ forms carry ``/class``."""
    return " ".join(seg.columns())


def parse(text: str, surface: str = "") -> Segmentation:
    tokens = text.split()
    if len(tokens) != 20:
        raise ParseError(f"expected 20 tokens, got {len(tokens)}")
    entries = []
    for col, token in enumerate(tokens, start=1):
        if token == "-":
            continue
        sid = COLUMN_SLOT[col]
        form, sep, cls = token.partition("/")
        class_id = int(cls) if sep else None
        entries.append((sid, form, class_id))
    return Segmentation(surface=surface, entries=tuple(entries))


def indicator_features(seg: Segmentation, inventory) -> frozenset[int]:
    """The applicable morphological indicator features (numbered 1..47)."""

    def tags(slot_name, form, class_id):
        for m in inventory.lookup(slot_name):
            if m.form == form and (class_id is None or m.class_id == class_id):
                yield m.tag

    bits = set()
    subj = seg.entry_in("SUBJ")
    if subj:
        bits.add(1)
        subj_tags = set(tags("SUBJ", subj[0], subj[1]))
        if "human" in subj_tags:
            bits.add(3)
        if "loc" in subj_tags:
            bits.add(4)
    else:
        bits.add(2)

    objs = []  # (slot name, form)
    for name in ("OBJ3", "OBJ2", "OBJ1"):
        entry = seg.entry_in(name)
        if entry:
            objs.append((name, entry[0]))
    if objs:
        bits.add(5)
        for name, form in objs:
            otags = set(tags(name, form, None))
            if "human" in otags:
                bits.add(6)
            if "loc" in otags:
                bits.add(7)
        if any(form in ("ka", "ku") for _, form in objs):
            bits.add(33)

    refl = seg.entry_in("REFL") is not None
    if refl:
        bits.add(8)

    obj3 = seg.entry_in("OBJ3") is not None
    obj2 = seg.entry_in("OBJ2") is not None
    obj1 = seg.entry_in("OBJ1") is not None
    if obj3:
        bits.add(9)
    if obj2:
        bits.add(10)
    if obj1 and obj2 and obj3:
        bits.add(11)

    suffixes = seg.forms_in("SUFF")
    has_suff = bool(suffixes)
    passive = seg.entry_in("P-SUFF") is not None

    if obj2 and obj3 and has_suff:
        bits.add(12)
    if obj3 and has_suff:
        bits.add(13)
    if obj2 and obj3 and refl and has_suff:
        bits.add(14)
    if obj3 and refl and has_suff:
        bits.add(15)

    identity = {"ish": 16, "ir": 17, "iz": 18, "an": 19, "ik": 20, "uk": 21, "ur": 22, "y": 23}
    for form in suffixes:
        if form in identity:
            bits.add(identity[form])
    if passive:
        bits.add(24)

    def ordered(first, second):
        if first in suffixes and second in suffixes:
            return suffixes.index(first) < len(suffixes) - 1 - suffixes[::-1].index(second)
        return False

    if ordered("ir", "y"):
        bits.add(25)
    if "ir" in suffixes and passive:
        bits.add(26)
    if ordered("an", "y"):
        bits.add(27)
    if ordered("iz", "y"):
        bits.add(28)
    if "y" in suffixes and passive:
        bits.add(29)
    if seg.entry_in("LOC-P") is not None:
        bits.add(30)

    for rule_id, feature in _RULE_FEATURE.items():
        if rule_id in seg.applied_rules:
            bits.add(feature)

    if suffixes.count("ish") >= 2:
        bits.add(34)
    if suffixes.count("ir") >= 2:
        bits.add(35)
    if obj3 and has_suff and passive:
        bits.add(36)
    nonloc_obj = any("loc" not in set(tags(name, form, None)) for name, form in objs)
    if objs and nonloc_obj and not has_suff and not passive:
        bits.add(37)
    if len(suffixes) >= 2:
        bits.add(38)
    if len(suffixes) >= 3:
        bits.add(39)

    pre = seg.entry_in("PRE-IN")
    if pre and pre[0] == "ni":
        asp = seg.entry_in("ASP")
        if asp and asp[0] == "e":
            bits.add(40)
        else:
            bits.add(41)
    if ordered("an", "ir"):
        bits.add(44)
    if ordered("ur", "y"):
        bits.add(45)
    if "ur" in suffixes and passive:
        bits.add(46)
    if ordered("uk", "y"):
        bits.add(47)
    return frozenset(bits)
