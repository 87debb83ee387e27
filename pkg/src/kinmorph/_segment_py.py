"""Pure-Python candidate enumeration kernel.

Depth-first search over slot order: at each surface position try every
morpheme the next slots allow, in every realization the rewrite rules
permit, plus free stem residues at the stem slot.  Returns raw candidate
entry lists; constraint filtering, generation verification and ordering
happen in :mod:`kinmorph.analyzer`.

The compiled twin in ``_segment_cy.pyx`` implements the same search; the
active kernel is picked at import time in :mod:`kinmorph.analyzer`.
"""

from __future__ import annotations

from .morphotactics import STEM_SLOT, SUFF_SLOTS

KERNEL_NAME = "pure-python"


def enumerate_candidates(word, inv, rewriter, max_raw=4096):
    """All raw analyses of ``word``.

    Returns a list of (entries, rules) where entries is a tuple of
    (slot_id, deep_form, class_id, rule_id_or_None) and rules the set of
    rule ids applied anywhere in the candidate.
    """
    n = len(word)
    out = []
    slot_morphemes = {spec.id: inv.lookup(spec.id) for spec in inv.slots}
    slot_ids = sorted(slot_morphemes)

    def emit(entries):
        if len(out) < max_raw:
            out.append(tuple(entries))

    def rec(pos, cursor, pending, suffix_used, have_stem, prev_zero, entries):
        if len(out) >= max_raw:
            return
        if pos == n and have_stem and pending is None:
            emit(entries)
            # a complete parse may still extend with zero-width morphemes,
            # so fall through and keep searching
        for sid in slot_ids:
            if sid < cursor:
                continue
            if sid == cursor and sid not in SUFF_SLOTS:
                continue
            if sid in SUFF_SLOTS and suffix_used >= inv.suffix_columns:
                continue
            if sid == STEM_SLOT:
                if have_stem:
                    continue
                for deep, consumed, rule_id, pend in rewriter.stem_matches(word, pos, pending):
                    if consumed == 0 and (prev_zero or not entries):
                        continue
                    entries.append((sid, deep, None, rule_id))
                    rules_ok = rule_id is None
                    rec(pos + consumed, sid, pend, suffix_used, True, consumed == 0, entries)
                    entries.pop()
                    del rules_ok
                continue
            for m in slot_morphemes[sid]:
                for match in rewriter.match_morpheme(word, m.form, pos, sid, pending):
                    if match.consumed == 0 and (prev_zero or not entries):
                        continue
                    entries.append((sid, m.form, m.class_id, match.rule_id))
                    rec(
                        pos + match.consumed,
                        sid,
                        match.pending,
                        suffix_used + (1 if sid in SUFF_SLOTS else 0),
                        have_stem,
                        match.consumed == 0,
                        entries,
                    )
                    entries.pop()

    rec(0, 0, None, 0, False, False, [])
    return out
