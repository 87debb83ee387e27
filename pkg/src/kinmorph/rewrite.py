"""Morphographemic rewriting between deep morpheme sequences and surface text.

Rules fire at morpheme boundaries and are written ``lhs -> rhs`` where the
``+`` in the lhs marks the boundary: the part before ``+`` is consumed from
the left morpheme's tail, the part after it from the right morpheme's head,
and the rhs replaces both on the surface.  Optional bracketed conditions:

    [left:<regex>]   searched against the material to the left of the tail
    [right:<regex>]  matched against the material following the head
    [lslot:NAME] / [rslot:NAME]  slot of the left / right morpheme
    [whole]          the tail must be the left morpheme's entire form
    [id:NAME]        stable rule identifier (defaults to "lhs>rhs")
    [gen|ana|both]   direction the rule participates in (default both)

Generation runs three passes: head rules (empty tail) left-to-right,
whole-morpheme rules right-to-left (so voicing chains resolve), then the
remaining boundary rules left-to-right.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import ParseError, ValidationError
from .morphotactics import STEM_SLOT, normalize_slot_name, slot_id_for_name

def _scan_attrs(text):
    """Split ``rhs [key:value] [flag]`` allowing brackets inside values."""
    attrs = []
    plain = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch != "[":
            plain.append(ch)
            i += 1
            continue
        depth = 1
        j = i + 1
        while j < len(text) and depth:
            if text[j] == "[":
                depth += 1
            elif text[j] == "]":
                depth -= 1
            j += 1
        if depth:
            raise ValueError("unterminated [ ... ] attribute")
        body = text[i + 1: j - 1]
        key, sep, value = body.partition(":")
        attrs.append((key.strip(), value if sep else None))
        i = j
    return "".join(plain).strip(), attrs


@dataclass(frozen=True)
class RewriteRule:
    rule_id: str
    tail: str  # deep suffix consumed from the left morpheme ("" for head rules)
    head: str  # deep prefix consumed from the right morpheme
    out: str  # surface replacement for tail+head
    left: Optional[re.Pattern] = None
    right: Optional[re.Pattern] = None
    lslot: Optional[int] = None
    rslot: Optional[int] = None
    whole: bool = False
    phase: int = 3
    mode: str = "both"  # gen | ana | both

    def gen_enabled(self):
        return self.mode in ("gen", "both")

    def ana_enabled(self):
        return self.mode in ("ana", "both")


@dataclass(frozen=True)
class Pending:
    """Obligation a boundary rule imposes on the next morpheme."""

    consumed: str = ""  # deep prefix already realized (consumes no surface)
    head_class: Optional[re.Pattern] = None  # deep form must match this


@dataclass(frozen=True)
class Match:
    """One way a morpheme form can be realized at a surface position."""

    consumed: int
    rule_id: Optional[str]
    pending: Optional[Pending] = None


@dataclass
class RuleTable:
    rules: list[RewriteRule] = field(default_factory=list)

    def by_phase(self, phase):
        return [r for r in self.rules if r.phase == phase]


def parse_rules(source) -> RuleTable:
    """Parse a rule file (see module docstring for the line format)."""
    if isinstance(source, str):
        source = io.StringIO(source)
    rules = []
    seen_ids = set()
    for lineno, raw in enumerate(source, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" not in line:
            raise ParseError("missing '->'", line=lineno)
        lhs_text, _, rest = line.partition("->")
        lhs_text = lhs_text.strip()
        try:
            rhs_text, attr_list = _scan_attrs(rest)
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno)
        attrs = {}
        mode = "both"
        for key, value in attr_list:
            if key in ("gen", "ana", "both") and value is None:
                mode = key
            else:
                attrs[key] = value if value is not None else True
        if "+" in lhs_text:
            tail, _, head = lhs_text.partition("+")
        else:
            tail, head = lhs_text, ""
        out = rhs_text.replace("+", "")
        if not tail and not head:
            raise ParseError("rule consumes no deep material", line=lineno)
        left = re.compile(attrs["left"]) if "left" in attrs else None
        right = re.compile(attrs["right"]) if "right" in attrs else None
        lslot = slot_id_for_name(attrs["lslot"]) if "lslot" in attrs else None
        rslot = slot_id_for_name(attrs["rslot"]) if "rslot" in attrs else None
        whole = bool(attrs.get("whole", False))
        if "phase" in attrs:
            phase = int(attrs["phase"])
        elif not tail:
            phase = 1
        elif whole:
            phase = 2
        else:
            phase = 3
        rule_id = attrs.get("id") or f"{lhs_text}>{out or '0'}"
        if rule_id in seen_ids:
            raise ParseError(f"duplicate rule id {rule_id!r}", line=lineno)
        seen_ids.add(rule_id)
        rules.append(
            RewriteRule(
                rule_id=rule_id,
                tail=tail,
                head=head,
                out=out,
                left=left,
                right=right,
                lslot=lslot,
                rslot=rslot,
                whole=whole,
                phase=phase,
                mode=mode,
            )
        )
    return RuleTable(rules)


def _slot_ok(rule_slot, actual_slot):
    if rule_slot is None:
        return True
    if rule_slot in (12, 13):  # either SUFF id satisfies a SUFF condition
        return actual_slot in (12, 13)
    return rule_slot == actual_slot


def _coerce_tokens(deep, infer_slots):
    """Accept plain forms or (form, slot) pairs; infer slots when absent."""
    pairs = []
    needs_inference = False
    for item in deep:
        if isinstance(item, str):
            pairs.append((item, None))
            needs_inference = True
        else:
            form, slot = item
            sid = slot if isinstance(slot, int) else slot_id_for_name(slot)
            pairs.append((form, sid))
    if needs_inference:
        if infer_slots is None:
            raise ValidationError("slot inference requires an inventory")
        pairs = infer_slots(pairs)
    return pairs


def infer_slot_assignment(inventory, pairs):
    """Assign slots to bare forms: the lexicographically smallest valid
    non-decreasing assignment with exactly one STEM.  Unknown forms can
    only be the stem."""
    n = len(pairs)
    best = None

    def options(form):
        outs = sorted({m.slot for m in inventory.morphemes if m.form == form})
        outs.append(STEM_SLOT)
        return sorted(set(outs))

    def rec(i, cursor, have_stem, acc):
        nonlocal best
        if best is not None:
            return
        if i == n:
            if have_stem:
                best = list(acc)
            return
        form, fixed = pairs[i]
        cands = [fixed] if fixed is not None else options(form)
        for sid in cands:
            if sid < cursor:
                continue
            if sid == cursor and sid not in (12, 13):
                continue
            if sid == STEM_SLOT and have_stem:
                continue
            acc.append((form, sid))
            rec(i + 1, sid, have_stem or sid == STEM_SLOT, acc)
            acc.pop()

    rec(0, 0, False, [])
    if best is None:
        raise ValidationError(f"no valid slot assignment for {[p[0] for p in pairs]}")
    return best


class Rewriter:
    """Applies a rule table in both directions."""

    def __init__(self, table: RuleTable, inventory=None):
        self.table = table
        self.inventory = inventory
        self._ana_rules = [r for r in table.rules if r.ana_enabled()]

    # ------------------------------------------------------------------
    # generation
    # ------------------------------------------------------------------

    def to_surface(self, deep: Sequence, with_rules: bool = False):
        """Render a deep morpheme sequence (forms or (form, slot) pairs).

        Deterministic and total: boundaries with no matching rule
        concatenate verbatim.
        """
        infer = None
        if self.inventory is not None:
            infer = lambda pairs: infer_slot_assignment(self.inventory, pairs)
        pairs = _coerce_tokens(deep, infer)
        texts = [form for form, _ in pairs]
        slots = [slot for _, slot in pairs]
        applied: list[str] = []

        def left_material(i, tail_len):
            s = "".join(texts[: i + 1])
            return s[: len(s) - tail_len] if tail_len else s

        # phase 1: head rules, left to right
        rules1 = [r for r in self.table.by_phase(1) if r.gen_enabled()]
        for i in range(1, len(texts)):
            for r in rules1:
                if not _slot_ok(r.rslot, slots[i]) or not _slot_ok(r.lslot, slots[i - 1]):
                    continue
                if r.head and not texts[i].startswith(r.head):
                    continue
                if r.left is not None and not r.left.search("".join(texts[:i])):
                    continue
                if r.right is not None and not r.right.search(texts[i][len(r.head):]):
                    continue
                texts[i] = r.out + texts[i][len(r.head):]
                applied.append(r.rule_id)
                break

        # phase 2: whole-morpheme rules, right to left
        rules2 = [r for r in self.table.by_phase(2) if r.gen_enabled()]
        for i in range(len(texts) - 2, -1, -1):
            right_mat = "".join(texts[i + 1:])
            for r in rules2:
                if texts[i] != r.tail:
                    continue
                if not _slot_ok(r.lslot, slots[i]) or not _slot_ok(r.rslot, slots[i + 1]):
                    continue
                if r.head and not right_mat.startswith(r.head):
                    continue
                if r.left is not None and not r.left.search("".join(texts[:i])):
                    continue
                if r.right is not None and not r.right.search(right_mat[len(r.head):]):
                    continue
                texts[i] = r.out
                if r.head:
                    texts[i + 1] = texts[i + 1][len(r.head):]
                applied.append(r.rule_id)
                break

        # phase 3: boundary rules, left to right
        rules3 = [r for r in self.table.by_phase(3) if r.gen_enabled()]
        i = 0
        while i < len(texts) - 1:
            fired = None
            for r in rules3:
                if r.tail and not texts[i].endswith(r.tail):
                    continue
                if r.whole and texts[i] != r.tail:
                    continue
                if r.head and not texts[i + 1].startswith(r.head):
                    continue
                if not _slot_ok(r.lslot, slots[i]) or not _slot_ok(r.rslot, slots[i + 1]):
                    continue
                if r.left is not None and not r.left.search(left_material(i, len(r.tail))):
                    continue
                if r.right is not None:
                    after = texts[i + 1][len(r.head):] + "".join(texts[i + 2:])
                    if not r.right.search(after):
                        continue
                fired = r
                break
            if fired is not None:
                r = fired
                texts[i] = texts[i][: len(texts[i]) - len(r.tail)] + r.out
                texts[i + 1] = texts[i + 1][len(r.head):]
                applied.append(r.rule_id)
                if not texts[i + 1]:
                    del texts[i + 1]
                    del slots[i + 1]
                    continue  # re-examine boundary i with the new neighbor
            i += 1

        surface = "".join(texts)
        if with_rules:
            return surface, applied
        return surface

    # ------------------------------------------------------------------
    # analysis
    # ------------------------------------------------------------------

    def match_morpheme(
        self,
        surface: str,
        form: str,
        at: int,
        slot: Optional[int] = None,
        pending: Optional[Pending] = None,
    ) -> list[Match]:
        """Every way ``form`` can be realized at position ``at``.

        Returns matches with the surface length consumed, the boundary
        rule applied at this morpheme's tail (if any), and the pending
        obligation handed to the next morpheme.
        """
        out: list[Match] = []
        rest = form
        allow_whole = True
        if pending is not None:
            if pending.head_class is not None and not pending.head_class.match(form):
                return out
            if pending.consumed:
                if not form.startswith(pending.consumed):
                    return out
                rest = form[len(pending.consumed):]
                allow_whole = False
                if not rest:
                    return [Match(consumed=0, rule_id=None, pending=None)]

        def literal_and_tail(rest_part, pos, base_rule):
            # full literal realization
            if surface.startswith(rest_part, pos):
                out.append(Match(pos + len(rest_part) - at, base_rule, None))
            # tail rules: deep tail replaced by rule output on the surface
            for r in self._ana_rules:
                if not r.tail or r.phase == 1:
                    continue
                if r.whole:
                    continue  # handled separately on the intact form
                if not _slot_ok(r.lslot, slot):
                    continue
                if not rest_part.endswith(r.tail):
                    continue
                mid = rest_part[: len(rest_part) - len(r.tail)]
                if not surface.startswith(mid, pos):
                    continue
                spos = pos + len(mid)
                if not surface.startswith(r.out, spos):
                    continue
                if r.left is not None and not r.left.search(surface[:spos]):
                    continue
                pend = Pending(
                    consumed=r.head,
                    head_class=r.right if r.head == "" else None,
                )
                if pend.consumed == "" and pend.head_class is None:
                    pend = None
                out.append(Match(spos + len(r.out) - at, r.rule_id, pend))

        # optional head transformation (phase-1 rules)
        applied_head = False
        for r in self._ana_rules:
            if r.phase != 1 or not r.head:
                continue
            if not _slot_ok(r.rslot, slot):
                continue
            if not rest.startswith(r.head):
                continue
            if r.left is not None and not r.left.search(surface[:at]):
                continue
            if not surface.startswith(r.out, at):
                continue
            applied_head = True
            literal_and_tail(rest[len(r.head):], at + len(r.out), r.rule_id)
        literal_and_tail(rest, at, None)

        # whole-morpheme rules (voicing and similar)
        if allow_whole:
            for r in self._ana_rules:
                if not r.whole:
                    continue
                if r.tail != form:
                    continue
                if not _slot_ok(r.lslot, slot):
                    continue
                if r.left is not None and not r.left.search(surface[:at]):
                    continue
                if not surface.startswith(r.out, at):
                    continue
                pend = Pending(consumed=r.head, head_class=r.right if not r.head else None)
                if pend.consumed == "" and pend.head_class is None:
                    pend = None
                out.append(Match(len(r.out), r.rule_id, pend))

        # deduplicate, preserve discovery order
        seen = set()
        uniq = []
        for m in out:
            key = (m.consumed, m.rule_id, m.pending)
            if key not in seen:
                seen.add(key)
                uniq.append(m)
        _ = applied_head
        return uniq

    def stem_matches(self, surface: str, at: int, pending: Optional[Pending] = None):
        """Enumerate stem hypotheses starting at ``at``.

        Yields (deep_stem, consumed, rule_id, pending_out).  The stem is
        a free residue; boundary rules may transform its tail (rot ~ ros
        before a perfective -y-).  Deletion-style rules (empty surface
        output) and whole-morpheme rules never apply to stems.
        """
        prefix = ""
        if pending is not None:
            if pending.consumed:
                prefix = pending.consumed
            head_class = pending.head_class
        else:
            head_class = None
        results = []
        n = len(surface)
        for end in range(at + 1, n + 1):
            span = surface[at:end]
            deep = prefix + span
            if head_class is None or head_class.match(deep):
                results.append((deep, end - at, None, None))
            for r in self._ana_rules:
                if not r.tail or r.whole or r.phase == 1 or not r.out:
                    continue
                if r.lslot is not None and r.lslot != STEM_SLOT:
                    continue
                if not span.endswith(r.out):
                    continue
                body = span[: len(span) - len(r.out)]
                if r.left is not None and not r.left.search(surface[:at] + body):
                    continue
                deep_r = prefix + body + r.tail
                if not deep_r:
                    continue
                if head_class is not None and not head_class.match(deep_r):
                    continue
                pend = Pending(consumed=r.head, head_class=r.right if not r.head else None)
                if pend.consumed == "" and pend.head_class is None:
                    pend = None
                results.append((deep_r, end - at, r.rule_id, pend))
        # dedup on (deep, consumed, pending)
        seen = set()
        uniq = []
        for item in results:
            key = (item[0], item[1], item[3])
            if key not in seen:
                seen.add(key)
                uniq.append(item)
        return uniq

    def from_surface_matches(self, surface: str, morpheme_form: str, at: int):
        """Public inverse-realization query: set of (consumed, rule id)."""
        if at > len(surface):
            raise ValidationError("position beyond end of surface")
        return {(m.consumed, m.rule_id) for m in self.match_morpheme(surface, morpheme_form, at)}
