"""Morpheme inventory and the ordered slot system of the Kinyarwanda verb.

A verbal form is built from up to 16 ordered slot categories (nominal
augment, pre-prefix, subject marker, negation, TAM, emphatic, three
object markers, reflexive, stem, repeatable derivational suffixes,
passive suffix, aspect, locative post-suffix).  Every slot is optional
except the stem; suffixes may repeat up to ``suffix_columns`` times.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import ParseError, ValidationError

SLOT_NAMES = {
    1: "N-AUG",
    2: "PRE-IN",
    3: "SUBJ",
    4: "NEG",
    5: "TAM",
    6: "NA-EMPH",
    7: "OBJ3",
    8: "OBJ2",
    9: "OBJ1",
    10: "REFL",
    11: "STEM",
    12: "SUFF",
    13: "SUFF",
    14: "P-SUFF",
    15: "ASP",
    16: "LOC-P",
}

STEM_SLOT = 11
SUFF_SLOTS = (12, 13)
OBJ_SLOTS = (7, 8, 9)

#: slot id -> serialized column span (1-based, inclusive); SUFF gets 6 columns
SERIAL_COLUMNS = 20


def _compact(name: str) -> str:
    return name.strip().upper().replace("-", "").replace("_", "")


def normalize_slot_name(name: str) -> str:
    """Map spelling variants (``PRE_IN``, ``obj_1``) to the canonical name."""
    compacted = _compact(name)
    for sname in SLOT_NAMES.values():
        if _compact(sname) == compacted:
            return sname
    return name.strip().upper().replace("_", "-")


def slot_id_for_name(name: str) -> int:
    compacted = _compact(name)
    for sid, sname in SLOT_NAMES.items():
        if _compact(sname) == compacted:
            return sid
    raise ValidationError(f"unknown slot name {name!r}")


@dataclass(frozen=True)
class SlotSpec:
    id: int
    name: str
    repeatable: bool
    required: bool


@dataclass(frozen=True)
class Morpheme:
    form: str
    slot: int
    class_id: Optional[int] = None
    tag: str = "-"
    #: canonical serialization column for suffixes (12..17), 0 = default
    column: int = 0

    def key(self):
        return (self.form, self.slot, self.class_id, self.tag)


@dataclass
class Inventory:
    slots: list[SlotSpec] = field(default_factory=list)
    morphemes: list[Morpheme] = field(default_factory=list)
    suffix_columns: int = 6

    def __post_init__(self):
        self._by_slot: dict[int, list[Morpheme]] = {}
        for m in self.morphemes:
            self._by_slot.setdefault(m.slot, []).append(m)

    def lookup(self, slot: int | str) -> list[Morpheme]:
        """All morphemes of a slot; a name covers both SUFF ids."""
        if isinstance(slot, str):
            name = normalize_slot_name(slot)
            out = []
            for sid, sname in SLOT_NAMES.items():
                if sname == name:
                    out.extend(self._by_slot.get(sid, []))
            return out
        return list(self._by_slot.get(slot, []))

    def forms(self, slot: int | str) -> list[str]:
        return [m.form for m in self.lookup(slot)]

    def serialize(self) -> str:
        lines = ["# kinmorph inventory", f"#%suffix_columns={self.suffix_columns}"]
        declared = set()
        for m in self.morphemes:
            declared.add(m.slot)
            cls = "-" if m.class_id is None else str(m.class_id)
            fields = [str(m.slot), SLOT_NAMES[m.slot], m.form, cls, m.tag]
            if m.column:
                fields.append(f"col:{m.column}")
            lines.append("\t".join(fields))
        for spec in self.slots:
            if spec.id not in declared:
                lines.append(f"{spec.id}\t{spec.name}\t-\t-\t-")
        return "\n".join(lines) + "\n"


def _make_slots() -> list[SlotSpec]:
    return [
        SlotSpec(sid, name, repeatable=(name == "SUFF"), required=(name == "STEM"))
        for sid, name in sorted(SLOT_NAMES.items())
    ]


def load_inventory(source) -> Inventory:
    """Parse the tab-separated inventory format.

    One record per line: ``slot_id<TAB>slot_name<TAB>form<TAB>class_id|-<TAB>tag|-``
    with an optional ``col:N`` sixth field for suffix column placement.
    A record with form ``-`` declares an (empty) slot.  ``#`` starts a
    comment; a ``#%key=value`` line sets loader options.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    suffix_columns = 6
    morphemes: list[Morpheme] = []
    seen: set[tuple] = set()
    declared_slots: set[int] = set()
    for lineno, raw in enumerate(source, start=1):
        line = raw.rstrip("\n")
        if line.startswith("#%"):
            body = line[2:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                if key.strip() == "suffix_columns":
                    suffix_columns = int(value.strip())
            continue
        if "#" in line:
            line = line[: line.index("#")]
        line = line.strip()
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) not in (5, 6):
            raise ParseError(
                f"expected 5 or 6 tab-separated fields, got {len(parts)}", line=lineno
            )
        try:
            sid = int(parts[0])
        except ValueError:
            raise ParseError(f"bad slot id {parts[0]!r}", line=lineno)
        if sid not in SLOT_NAMES:
            raise ParseError(f"slot id {sid} out of range 1..16", line=lineno)
        name = normalize_slot_name(parts[1])
        if SLOT_NAMES[sid] != name:
            raise ParseError(
                f"slot id {sid} is {SLOT_NAMES[sid]}, record says {name}", line=lineno
            )
        declared_slots.add(sid)
        form = parts[2].strip()
        if form == "-":
            continue
        if not form or form != form.lower():
            raise ParseError(f"morpheme form must be non-empty lowercase: {form!r}", line=lineno)
        class_id = None if parts[3].strip() == "-" else int(parts[3])
        tag = parts[4].strip() or "-"
        column = 0
        if len(parts) == 6 and parts[5].strip():
            extra = parts[5].strip()
            if not extra.startswith("col:"):
                raise ParseError(f"unrecognized extra field {extra!r}", line=lineno)
            column = int(extra[4:])
        m = Morpheme(form=form, slot=sid, class_id=class_id, tag=tag, column=column)
        if m.key() in seen:
            raise ValidationError(
                f"duplicate morpheme {m.form!r} in slot {SLOT_NAMES[sid]} (line {lineno})"
            )
        seen.add(m.key())
        morphemes.append(m)
    missing = set(SLOT_NAMES) - declared_slots
    if missing:
        names = sorted(SLOT_NAMES[s] for s in missing)
        raise ValidationError(f"inventory is missing slots: {', '.join(names)}")
    inv = Inventory(slots=_make_slots(), morphemes=morphemes, suffix_columns=suffix_columns)
    return inv


def next_slots(inv: Inventory, filled: Iterable[int]) -> set[int]:
    """Slot ids that may legally follow the given occupancy.

    ``filled`` may contain repeats (suffix occurrences count against
    ``suffix_columns``); a plain set is treated as one occurrence each.
    """
    filled = list(filled)
    m = max(filled) if filled else 0
    suff_used = sum(1 for s in filled if s in SUFF_SLOTS)
    out = set()
    for spec in inv.slots:
        if spec.id > m:
            out.add(spec.id)
        elif spec.id == m and spec.repeatable and suff_used < inv.suffix_columns:
            out.add(spec.id)
    # the second SUFF id is reachable while inside the suffix region
    if m in SUFF_SLOTS and suff_used >= inv.suffix_columns:
        out -= set(SUFF_SLOTS)
    return out


def validate_order(inv: Inventory, seq: list[tuple[int, str]]) -> bool:
    """True iff a (slot id, form) sequence is a legal verbal template.

    Legal means: slot ids non-decreasing, repeats only in the SUFF
    region (at most ``suffix_columns`` of them), exactly one STEM, and
    every non-stem form present in that slot's inventory.
    """
    prev = 0
    stems = 0
    suff = 0
    for sid, form in seq:
        if sid not in SLOT_NAMES:
            return False
        if sid < prev:
            return False
        if sid == prev and not (sid in SUFF_SLOTS or prev in SUFF_SLOTS):
            return False
        if sid in SUFF_SLOTS:
            suff += 1
            if suff > inv.suffix_columns:
                return False
        if sid == STEM_SLOT:
            stems += 1
            if not form:
                return False
        elif sid in SUFF_SLOTS:
            if form not in inv.forms("SUFF"):
                return False
        else:
            if form not in inv.forms(sid):
                return False
        prev = sid
    return stems == 1
