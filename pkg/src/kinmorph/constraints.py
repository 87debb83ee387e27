"""Parser and evaluator for the constraint mini-language.

A rule is an implication between two predicates over a segmentation:

    {V;NEG;ta} => {!V;PRE_IN;nti}

Each predicate names a part of speech, a slot, and a value which is a
literal deep form, a ``/regex/`` or a length pattern ``#n``.  A leading
``!`` negates: in the antecedent it means "no slot matches", in the
consequent "no matching slot may exist".  Rules accumulate
conjunctively; value matching is against deep forms, before rewriting.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass
from typing import Optional

from .errors import ParseError
from .morphotactics import normalize_slot_name

_VALUE_KIND_LITERAL = "literal"
_VALUE_KIND_REGEX = "regex"
_VALUE_KIND_LENGTH = "length"


@dataclass(frozen=True)
class Predicate:
    negated: bool
    pos: str
    slot: str  # normalized slot name, e.g. PRE-IN
    kind: str
    value: str
    length: int = 0
    pattern: Optional[re.Pattern] = None

    def matches_value(self, form: str) -> bool:
        if self.kind == _VALUE_KIND_LITERAL:
            return form == self.value
        if self.kind == _VALUE_KIND_LENGTH:
            return len(form) == self.length
        return self.pattern.search(form) is not None

    def holds(self, seg) -> bool:
        """Evaluate against a segmentation (positive: some slot matches)."""
        if self.pos != "V":
            found = False
        else:
            found = any(
                self.matches_value(form)
                for name, form in seg.slot_values()
                if name == self.slot
            )
        return (not found) if self.negated else found

    def render(self) -> str:
        bang = "!" if self.negated else ""
        if self.kind == _VALUE_KIND_REGEX:
            value = f"/{self.value}/"
        elif self.kind == _VALUE_KIND_LENGTH:
            value = f"#{self.length}"
        else:
            value = self.value
        slot = self.slot.replace("-", "_")
        return "{%s%s;%s;%s}" % (bang, self.pos, slot, value)


@dataclass(frozen=True)
class ConstraintRule:
    antecedent: Predicate
    consequent: Predicate

    def render(self) -> str:
        return f"{self.antecedent.render()} => {self.consequent.render()}"


def _parse_predicate(text: str, offset: int) -> Predicate:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ParseError("predicate must be brace-delimited", column=offset)
    body = text[1:-1]
    parts = body.split(";")
    if len(parts) != 3:
        raise ParseError(
            f"predicate needs 3 ;-separated fields, got {len(parts)}", column=offset
        )
    pos, slot, value = (p.strip() for p in parts)
    negated = pos.startswith("!")
    if negated:
        pos = pos[1:].strip()
    if not pos:
        raise ParseError("empty part-of-speech field", column=offset)
    slot = normalize_slot_name(slot)
    if value.startswith("/") and value.endswith("/") and len(value) >= 2:
        try:
            pat = re.compile(value[1:-1])
        except re.error as exc:
            raise ParseError(f"bad regex {value!r}: {exc}", column=offset)
        return Predicate(negated, pos, slot, _VALUE_KIND_REGEX, value[1:-1], pattern=pat)
    if value.startswith("#"):
        try:
            n = int(value[1:])
        except ValueError:
            raise ParseError(f"bad length pattern {value!r}", column=offset)
        if n < 1:
            raise ParseError("length pattern must be >= 1", column=offset)
        return Predicate(negated, pos, slot, _VALUE_KIND_LENGTH, value, length=n)
    if not value:
        raise ParseError("empty value field", column=offset)
    return Predicate(negated, pos, slot, _VALUE_KIND_LITERAL, value)


def parse_rule(text: str) -> ConstraintRule:
    """Parse one ``{A;B;C} => {D;E;F}`` rule."""
    if "=>" not in text:
        raise ParseError("missing '=>'", column=text.find("}") + 1 if "}" in text else 0)
    left, _, right = text.partition("=>")
    ante = _parse_predicate(left, offset=0)
    cons = _parse_predicate(right, offset=len(left) + 2)
    return ConstraintRule(ante, cons)


def parse_rule_file(source) -> list[ConstraintRule]:
    if isinstance(source, str):
        source = io.StringIO(source)
    rules = []
    for lineno, raw in enumerate(source, start=1):
        line = raw.rstrip("\n")
        # '#' opens a comment only at line start or after whitespace, so
        # the length pattern '#n' survives
        for i, ch in enumerate(line):
            if ch == "#" and (i == 0 or line[i - 1].isspace()):
                line = line[:i]
                break
        line = line.strip()
        if not line:
            continue
        try:
            rules.append(parse_rule(line))
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}")
    return rules


def satisfies(seg, rule: ConstraintRule) -> bool:
    """True iff the antecedent does not hold or the consequent holds."""
    if not rule.antecedent.holds(seg):
        return True
    return rule.consequent.holds(seg)


def filter_segmentations(segs, rules) -> list:
    """Order-preserving filter keeping segmentations that satisfy all rules."""
    return [s for s in segs if all(satisfies(s, r) for r in rules)]
