"""Similarity, frequency and selection-ratio features; 64-value assembly.

Every real-valued feature passes through the normalizing sigmoid

    sigma(z) = [1 + exp(-8 (z - min_f) / (Max_f - min_f))]^-8

whose active range (min_f, Max_f) depends on the feature family.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import ParseError, ValidationError

MEAN_FLOOR = 1e-6  # geometric/harmonic guard against exact zeros

SIMILARITY = "similarity"
COUNT = "count"
DISTANCE = "distance"
RATIO = "ratio"
POPULARITY = "popularity"

FEATURE_COUNT = 47
VECTOR_WIDTH = 64

HEADER = (
    ["sim_arith", "sim_geo", "sim_harm", "freq_dist"]
    + ["pop_arith", "pop_geo", "pop_harm", "pop_self"]
    + ["all_arith", "all_geo", "all_harm"]
    + ["ratio_arith", "ratio_geo", "ratio_harm"]
    + [f"ratio_f{i:02d}" for i in range(1, FEATURE_COUNT + 1)]
    + ["infl_type_pop", "lex_small", "lex_large"]
)
assert len(HEADER) == VECTOR_WIDTH


@dataclass(frozen=True)
class NormalizerConfig:
    """Per-family (min_f, Max_f) active ranges."""

    ranges: dict = field(
        default_factory=lambda: {
            SIMILARITY: (0.0, 1.0),
            COUNT: (0.0, 10000.0),
            DISTANCE: (0.0, math.sqrt(2.0)),
            RATIO: (-1.0, 1.0),
            POPULARITY: (0.0, 1.0),
        }
    )

    def range_for(self, family: str) -> tuple[float, float]:
        lo, hi = self.ranges[family]
        if hi <= lo:
            raise ValidationError(f"normalizer range for {family} must have Max > min")
        return lo, hi

    def with_range(self, family, lo, hi):
        updated = dict(self.ranges)
        updated[family] = (float(lo), float(hi))
        return replace(self, ranges=updated)


@dataclass(frozen=True)
class AssemblyContext:
    k_nearest: int = 10
    inflection_cap: int = 64
    neutral: float = 0.5

    def __post_init__(self):
        if not (1 <= self.k_nearest <= self.inflection_cap):
            raise ValidationError("need 1 <= K <= N")


def norm_sigmoid(z: float, family: str, cfg: NormalizerConfig) -> float:
    lo, hi = cfg.range_for(family)
    return (1.0 + math.exp(-8.0 * (z - lo) / (hi - lo))) ** -8.0


def three_means(values) -> tuple[float, float, float]:
    """(arithmetic, geometric, harmonic); inputs floored at MEAN_FLOOR."""
    vals = [max(v, MEAN_FLOOR) for v in values]
    if not vals:
        raise ValidationError("means of an empty collection")
    n = len(vals)
    arith = sum(vals) / n
    geo = math.exp(sum(math.log(v) for v in vals) / n)
    harm = n / sum(1.0 / v for v in vals)
    return (arith, geo, harm)


def d_e(x: str, y: str, stores, cfg: NormalizerConfig, neutral: float = 0.5) -> float:
    """Sigmoid-normalized angular similarity; the neutral value when OOV."""
    raw = stores.angular_similarity(x, y)
    if raw is None:
        return neutral
    return norm_sigmoid(raw, SIMILARITY, cfg)


def nearest_inflections(x, inflections, stores, cfg, k, neutral=0.5):
    """The K inflections nearest to x by d_e, with their similarity values.

    Ties break lexicographically so repeated runs are identical.
    """
    scored = [(d_e(x, y, stores, cfg, neutral), y) for y in inflections]
    scored.sort(key=lambda it: (-it[0], it[1]))
    return scored[:k]


def similarity_feature(x, inflections, stores, cfg, k, neutral=0.5):
    if not inflections:
        return (neutral, neutral, neutral)
    nearest = nearest_inflections(x, inflections, stores, cfg, k, neutral)
    return three_means([s for s, _ in nearest])


def _tc_td(word, stores, cfg):
    tc, dc = stores.counts(word)
    return (
        norm_sigmoid(float(tc), COUNT, cfg),
        norm_sigmoid(float(dc), COUNT, cfg),
    )


def d_t(x, nearest, stores, cfg) -> float:
    """Eq.-6 style popularity distance between x and its inflection set."""
    if not nearest:
        raise ValidationError("nearest set must be non-empty")
    tcx, tdx = _tc_td(x, stores, cfg)
    acc = 0.0
    for y in nearest:
        tcy, tdy = _tc_td(y, stores, cfg)
        acc += math.sqrt((tcx - tcy) ** 2 + (tdx - tdy) ** 2)
    return norm_sigmoid(acc / len(nearest), DISTANCE, cfg)


def popularity(word, stores, cfg) -> float:
    tc, td = _tc_td(word, stores, cfg)
    return (tc + td) / 2.0


def popularity_features(nearest, x, stores, cfg):
    """Eq.-7 triple over the retained inflections plus x's own popularity."""
    if not nearest:
        raise ValidationError("nearest set must be non-empty")
    triple = three_means([popularity(y, stores, cfg) for y in nearest])
    return triple, popularity(x, stores, cfg)


# ---------------------------------------------------------------------------
# chosen / proposed statistics
# ---------------------------------------------------------------------------


@dataclass
class StatTables:
    chosen: dict = field(default_factory=dict)  # (feature_no, stem) -> int
    proposed: dict = field(default_factory=dict)  # (feature_no, stem) -> int >= 0

    def copy(self) -> "StatTables":
        return StatTables(chosen=dict(self.chosen), proposed=dict(self.proposed))

    def serialize(self) -> str:
        lines = []
        for key in sorted(self.proposed):
            f, stem = key
            lines.append(f"{f}\t{stem}\t{self.chosen.get(key, 0)}\t{self.proposed[key]}")
        return "\n".join(lines) + ("\n" if lines else "")


def load_stats(source) -> StatTables:
    if isinstance(source, str):
        source = io.StringIO(source)
    tables = StatTables()
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise ParseError("expected feature<TAB>stem<TAB>chosen<TAB>proposed", line=lineno)
        key = (int(parts[0]), parts[1])
        tables.chosen[key] = int(parts[2])
        tables.proposed[key] = int(parts[3])
        if tables.proposed[key] < 0:
            raise ValidationError(f"negative proposed count at line {lineno}")
    return tables


def update_stats(tables: StatTables, word, analyses, chosen_stem: Optional[str]) -> StatTables:
    """Fold one annotation event into the chosen/proposed tables.

    ``analyses`` is a list of (stem, indicator feature set).  Each
    analysis bumps ``proposed`` for its (feature, stem) pairs; ``chosen``
    moves up for the selected stem and down for every rejected one.
    Returns a new StatTables; the input is left untouched.
    """
    stems = {stem for stem, _ in analyses}
    if chosen_stem is not None and chosen_stem not in stems:
        raise ValidationError(
            f"chosen stem {chosen_stem!r} is not among the analyses of {word!r}"
        )
    out = tables.copy()
    for stem, feats in analyses:
        delta = 1 if stem == chosen_stem else -1
        for f in feats:
            key = (f, stem)
            out.proposed[key] = out.proposed.get(key, 0) + 1
            out.chosen[key] = out.chosen.get(key, 0) + delta
    return out


def ratio_features(tables: StatTables, stem, feats, cfg: NormalizerConfig):
    """(Eq.-9 triple, Eq.-10 vector of 47 per-feature ratio scores).

    Features absent from the analysis, and features with no proposal
    evidence, emit the ratio-family neutral sigma(0).
    """
    neutral = norm_sigmoid(0.0, RATIO, cfg)
    vector = []
    present_scores = []
    for f in range(1, FEATURE_COUNT + 1):
        if f not in feats:
            vector.append(neutral)
            continue
        key = (f, stem)
        proposed = tables.proposed.get(key, 0)
        if proposed <= 0:
            score = neutral
        else:
            ratio = tables.chosen.get(key, 0) / proposed
            score = norm_sigmoid(ratio, RATIO, cfg)
        vector.append(score)
        present_scores.append(score)
    triple = three_means(present_scores) if present_scores else (neutral, neutral, neutral)
    return triple, vector


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------


def assemble(
    word: str,
    stem: str,
    feats,
    inflections,  # (surface, template index) pairs
    stores,
    tables: StatTables,
    cfg: NormalizerConfig,
    ctx: AssemblyContext,
) -> list[float]:
    """The 64-value network input for one candidate segmentation."""
    neutral = ctx.neutral
    words = [w for w, _ in inflections]
    template_of = dict(inflections)

    if words:
        nearest = nearest_inflections(word, words, stores, cfg, ctx.k_nearest, neutral)
        nearest_words = [w for _, w in nearest]
        sim_triple = three_means([s for s, _ in nearest])
        dist = d_t(word, nearest_words, stores, cfg)
        pop_triple, pop_self = popularity_features(nearest_words, word, stores, cfg)
        # popularity of the inflection templates that produced the retained set
        by_template: dict[int, list[float]] = {}
        for y in nearest_words:
            by_template.setdefault(template_of[y], []).append(popularity(y, stores, cfg))
        tpop = {t: sum(v) / len(v) for t, v in by_template.items()}
        type_pop = norm_sigmoid(
            sum(tpop[template_of[y]] for y in nearest_words) / len(nearest_words),
            POPULARITY,
            cfg,
        )
    else:
        sim_triple = (neutral, neutral, neutral)
        dist = neutral
        pop_triple = (neutral, neutral, neutral)
        pop_self = popularity(word, stores, cfg)
        type_pop = neutral

    similarity_block = list(sim_triple) + [dist] + list(pop_triple) + [pop_self]
    all_triple = three_means(similarity_block)
    ratio_triple, ratio_vector = ratio_features(tables, stem, feats, cfg)

    values = (
        list(sim_triple)
        + [dist]
        + list(pop_triple)
        + [pop_self]
        + list(all_triple)
        + list(ratio_triple)
        + ratio_vector
        + [type_pop]
        + [
            1.0 if (stores.lexicon_small and stem in stores.lexicon_small) else 0.0,
            1.0 if (stores.lexicon_large and stem in stores.lexicon_large) else 0.0,
        ]
    )
    assert len(values) == VECTOR_WIDTH
    if not all(0.0 <= v <= 1.0 for v in values):
        raise ValidationError("feature vector out of [0,1]")
    return values


def vector_csv_header() -> str:
    return ",".join(HEADER)


def vector_to_csv(values) -> str:
    return ",".join(repr(v) for v in values)
