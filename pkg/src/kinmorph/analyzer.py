"""Candidate enumeration, generation, inflection sets, indicator features.

The hot inner loop (per-word candidate search) lives in a kernel module:
a Cython extension when built, otherwise the pure-Python twin.  Set
``KINMORPH_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import logging
import os
from importlib import resources

from . import _segment_py
from .constraints import filter_segmentations, parse_rule_file
from .errors import ValidationError
from .morphotactics import STEM_SLOT, load_inventory
from .rewrite import Rewriter, parse_rules
from .segmentation import Segmentation, indicator_features, serialize

log = logging.getLogger(__name__)

_cy_kernel = None
if not os.environ.get("KINMORPH_PURE"):
    try:
        from . import _segment_cy as _cy_kernel  # type: ignore[no-redef]
    except ImportError:
        _cy_kernel = None


def active_kernel_name() -> str:
    return _cy_kernel.KERNEL_NAME if _cy_kernel is not None else _segment_py.KERNEL_NAME


def data_path(name: str):
    return resources.files("kinmorph.data").joinpath(name)


def load_templates(source=None) -> list[list[tuple[str, str]]]:
    """Affix templates: one per line, comma-separated SLOT:form entries."""
    if source is None:
        source = data_path("templates.txt").read_text()
    templates = []
    for raw in source.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        affixes = []
        for item in line.split(","):
            slot, _, form = item.strip().partition(":")
            affixes.append((slot.strip(), form.strip()))
        templates.append(affixes)
    return templates


class Analyzer:
    """Immutable after construction; analyze/generate are pure."""

    def __init__(
        self,
        inventory=None,
        rewrites=None,
        constraints=None,
        templates=None,
        max_analyses: int = 256,
        inflection_cap: int = 64,
    ):
        if inventory is None:
            inventory = load_inventory(data_path("inventory.tsv").read_text())
        if rewrites is None:
            rewrites = parse_rules(data_path("rewrites.rules").read_text())
        if constraints is None:
            constraints = parse_rule_file(data_path("constraints.rules").read_text())
        self.inventory = inventory
        self.rules = rewrites
        self.constraints = constraints
        self.rewriter = Rewriter(rewrites, inventory)
        self.templates = templates if templates is not None else load_templates()
        self.max_analyses = max_analyses
        self.inflection_cap = inflection_cap
        # forms that occur once in their slot display without a class id,
        # matching the paper's serialization convention
        self._ambiguous = set()
        counts = {}
        for m in inventory.morphemes:
            counts[(m.slot, m.form)] = counts.get((m.slot, m.form), 0) + 1
        self._ambiguous = {key for key, c in counts.items() if c > 1}
        self._kernel = _cy_kernel if _cy_kernel is not None else _segment_py
        self._cy_tables = None
        if self._kernel is _cy_kernel and _cy_kernel is not None:
            try:
                self._cy_tables = _cy_kernel.compile_tables(inventory, rewrites)
            except Exception:  # unrecognized rule shape: fall back
                log.warning("compiled kernel cannot encode rule table; using pure kernel")
                self._kernel = _segment_py

    # ------------------------------------------------------------------

    def analyze_raw(self, word: str):
        """Kernel output before constraint filtering and verification."""
        if self._kernel is _segment_py:
            return _segment_py.enumerate_candidates(word, self.inventory, self.rewriter)
        return self._kernel.enumerate_candidates(word, self._cy_tables)

    def analyze(self, word: str) -> list[Segmentation]:
        """Exhaustive, constraint-filtered, verified, deduplicated analyses
        in lexicographic serialization order."""
        if not word:
            raise ValidationError("word must be non-empty")
        if word != word.lower():
            raise ValidationError("word must be lowercase")
        segs = []
        for cand in self.analyze_raw(word):
            entries = tuple(
                (sid, form, cid if (sid, form) in self._ambiguous else None)
                for sid, form, cid, _ in cand
            )
            rules = frozenset(r for _, _, _, r in cand if r)
            segs.append(Segmentation(surface=word, entries=entries, applied_rules=rules))
        segs = filter_segmentations(segs, self.constraints)
        verified = []
        for seg in segs:
            if self._render(seg) == word:
                verified.append(seg)
        verified.sort(key=lambda s: (serialize(s), sorted(s.applied_rules)))
        deduped = []
        seen = set()
        for seg in verified:
            key = serialize(seg)
            if key not in seen:
                seen.add(key)
                deduped.append(seg)
        if len(deduped) > self.max_analyses:
            log.warning(
                "word %r produced %d analyses; keeping the first %d",
                word,
                len(deduped),
                self.max_analyses,
            )
            deduped = deduped[: self.max_analyses]
        return deduped

    def _render(self, seg: Segmentation) -> str:
        return self.rewriter.to_surface([(form, sid) for sid, form, _ in seg.entries])

    def generate(self, seg: Segmentation) -> str:
        """Render a segmentation; raises when it is not well-formed."""
        from .constraints import satisfies
        from .morphotactics import validate_order

        seq = [(sid, form) for sid, form, _ in seg.entries]
        if not validate_order(self.inventory, seq):
            raise ValidationError("segmentation violates slot order or inventory")
        if not all(satisfies(seg, r) for r in self.constraints):
            raise ValidationError("segmentation violates constraint rules")
        return self._render(seg)

    # ------------------------------------------------------------------

    def template_deep(self, stem: str, template) -> list[tuple[str, int]]:
        from .morphotactics import slot_id_for_name

        deep = []
        placed = False
        for slot_name, form in template:
            sid = slot_id_for_name(slot_name)
            if sid > STEM_SLOT and not placed:
                deep.append((stem, STEM_SLOT))
                placed = True
            deep.append((form, sid))
        if not placed:
            deep.append((stem, STEM_SLOT))
        return deep

    def inflection_set_detailed(self, stem, templates=None, vocab=None, cap=None):
        """(surface, template index) pairs for vocabulary-attested inflections."""
        templates = self.templates if templates is None else templates
        if not templates:
            raise ValidationError("templates must be non-empty")
        cap = self.inflection_cap if cap is None else cap
        if vocab is None:
            accept = lambda w: True
        elif callable(vocab):
            accept = vocab
        else:
            accept = lambda w, _v=vocab: w in _v
        out = []
        seen = set()
        for idx, template in enumerate(templates):
            deep = self.template_deep(stem, template)
            surface = self.rewriter.to_surface(sorted(deep, key=lambda p: p[1]))
            if surface in seen or not accept(surface):
                continue
            seen.add(surface)
            out.append((surface, idx))
            if len(out) >= cap:
                break
        return out

    def inflection_set(self, stem, templates=None, vocab=None, cap=None) -> list[str]:
        return [w for w, _ in self.inflection_set_detailed(stem, templates, vocab, cap)]

    def lemma(self, stem: str) -> str:
        """Citation (infinitive) form: ku- + stem + -a."""
        return self.rewriter.to_surface([("ku", 3), (stem, STEM_SLOT), ("a", 15)])

    def indicator_features(self, seg: Segmentation):
        return indicator_features(seg, self.inventory)
