"""Dataset construction, splits, selection rules, training and evaluation."""

from __future__ import annotations

import io
import logging
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import ParseError, ValidationError
from .features import AssemblyContext, NormalizerConfig, StatTables, assemble, update_stats
from .model import AdamState, Prediction, Scorer, TrainConfig, adam_step, lamb_step, softmax

log = logging.getLogger(__name__)

_LABEL_RE = re.compile(r"^(?P<surface>[^/\s]+)/(?P<stem>[^:\s]+):(?P<chosen>\d+)/(?P<proposed>\d+)$")


@dataclass(frozen=True)
class LabeledPair:
    surface: str
    stem: str
    chosen: int
    proposed: int
    annotator: str = "-"

    def __post_init__(self):
        if self.proposed < 1 or not (0 <= self.chosen <= self.proposed):
            raise ValidationError(f"bad counts {self.chosen}/{self.proposed}")

    def render(self) -> str:
        line = f"{self.surface}/{self.stem}:{self.chosen}/{self.proposed}"
        if self.annotator != "-":
            line += f"\t{self.annotator}"
        return line


def parse_labels(source) -> list[LabeledPair]:
    """Lines of ``surface/stem:chosen/proposed[<TAB>annotator[<TAB>extra]]``."""
    if isinstance(source, str):
        source = io.StringIO(source)
    out = []
    for lineno, raw in enumerate(source, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split("\t")
        m = _LABEL_RE.match(fields[0])
        if m is None:
            raise ParseError(f"bad label line {fields[0]!r}", line=lineno)
        annotator = fields[1].strip() if len(fields) > 1 and fields[1].strip() else "-"
        out.append(
            LabeledPair(
                surface=m.group("surface"),
                stem=m.group("stem"),
                chosen=int(m.group("chosen")),
                proposed=int(m.group("proposed")),
                annotator=annotator,
            )
        )
    return out


def render_labels(pairs: Iterable[LabeledPair]) -> str:
    return "".join(p.render() + "\n" for p in pairs)


@dataclass
class Instance:
    surface: str
    candidates: list  # (Segmentation, feature vector) pairs
    gold_stem: Optional[str] = None
    annotator: str = "-"

    def __post_init__(self):
        if not self.candidates:
            raise ValidationError("instance needs at least one candidate")
        if self.gold_stem is not None:
            if all(seg.stem != self.gold_stem for seg, _ in self.candidates):
                raise ValidationError("gold stem matches no candidate")

    def stems(self):
        return [seg.stem for seg, _ in self.candidates]

    def matrix(self):
        return np.asarray([vec for _, vec in self.candidates], dtype=np.float64)


# ---------------------------------------------------------------------------
# dataset construction
# ---------------------------------------------------------------------------


def stats_from_labels(labels, analyzer, tables: Optional[StatTables] = None) -> StatTables:
    """Populate chosen/proposed tables by replaying annotation events."""
    tables = StatTables() if tables is None else tables
    for surface, group in _group_by_surface(labels).items():
        chosen = [p.stem for p in group if p.chosen > 0]
        if not chosen:
            continue
        analyses = analyzer.analyze(surface)
        if not analyses:
            continue
        pairs = [(s.stem, analyzer.indicator_features(s)) for s in analyses]
        if chosen[0] not in {stem for stem, _ in pairs}:
            continue
        tables = update_stats(tables, surface, pairs, chosen[0])
    return tables


def _group_by_surface(labels):
    grouped: dict[str, list] = {}
    for pair in labels:
        grouped.setdefault(pair.surface, []).append(pair)
    return grouped


def build_instances(
    labels,
    analyzer,
    stores,
    tables: StatTables,
    cfg: Optional[NormalizerConfig] = None,
    ctx: Optional[AssemblyContext] = None,
    reject_log: Optional[list] = None,
) -> list[Instance]:
    """One Instance per labeled surface word.

    Labels whose chosen stem matches no analysis are recorded to the
    reject log and skipped.
    """
    cfg = cfg or NormalizerConfig()
    ctx = ctx or AssemblyContext()
    instances = []
    for surface, group in _group_by_surface(labels).items():
        chosen = [p for p in group if p.chosen > 0]
        gold = chosen[0].stem if chosen else None
        annotator = group[0].annotator
        analyses = analyzer.analyze(surface)
        stems = {s.stem for s in analyses}
        if not analyses or (gold is not None and gold not in stems):
            if reject_log is not None:
                reject_log.append((surface, gold))
            log.info("rejecting %s/%s: no matching analysis", surface, gold)
            continue
        candidates = []
        for seg in analyses:
            feats = analyzer.indicator_features(seg)
            infl = analyzer.inflection_set_detailed(
                seg.stem, vocab=stores.vocab_test(), cap=ctx.inflection_cap
            )
            vec = assemble(surface, seg.stem, feats, infl, stores, tables, cfg, ctx)
            candidates.append((seg, vec))
        instances.append(
            Instance(surface=surface, candidates=candidates, gold_stem=gold, annotator=annotator)
        )
    return instances


# ---------------------------------------------------------------------------
# splits and sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitSpec:
    train: float = 0.70
    dev: float = 0.15
    test: float = 0.15
    seed: int = 0

    def __post_init__(self):
        if abs(self.train + self.dev + self.test - 1.0) > 1e-9:
            raise ValidationError("split fractions must sum to 1")


def split(instances, spec: SplitSpec):
    """Disjoint, exhaustive train/dev/test split keyed by surface word."""
    words = sorted({inst.surface for inst in instances})
    rng = np.random.default_rng(spec.seed)
    rng.shuffle(words)
    n = len(words)
    n_train = round(spec.train * n)
    n_dev = round(spec.dev * n)
    train_words = set(words[:n_train])
    dev_words = set(words[n_train: n_train + n_dev])
    test_words = set(words[n_train + n_dev:])
    train = [i for i in instances if i.surface in train_words]
    dev = [i for i in instances if i.surface in dev_words]
    test = [i for i in instances if i.surface in test_words]
    return train, dev, test


def upsample(instances, annotator_id, factor: int = 4):
    """Repeat the chosen annotator's instances in place, order stable."""
    out = []
    for inst in instances:
        copies = factor if inst.annotator == annotator_id else 1
        out.extend([inst] * copies)
    return out


# ---------------------------------------------------------------------------
# selection rules
# ---------------------------------------------------------------------------


def stem_probabilities(prediction: Prediction, stems) -> dict[str, float]:
    agg: dict[str, float] = {}
    for p, stem in zip(prediction.probs, stems):
        agg[stem] = agg.get(stem, 0.0) + float(p)
    return agg


def select_uncertain(predictions, top: int = 10000, min_entropy: float = 1.0):
    """Words whose prediction entropy exceeds the threshold, most
    uncertain first (ties break lexicographically), truncated to ``top``.

    ``predictions`` is an iterable of (word, Prediction).
    """
    qualified = [(w, p) for w, p in predictions if p.entropy > min_entropy]
    qualified.sort(key=lambda it: (-it[1].entropy, it[0]))
    return qualified[:top]


def select_confident(
    predictions_with_stems,
    min_top: float = 0.95,
    min_gap: float = 0.95,
    max_entropy: float = 0.1,
    min_stems: int = 3,
):
    """Pseudo-labels: P1 >= min_top, at least ``min_stems`` competing
    stems, P1 - P2 > min_gap and entropy < max_entropy, all on
    stem-aggregated probabilities.

    ``predictions_with_stems`` is an iterable of (word, Prediction,
    candidate stems).  Returns (word, best stem) pairs.
    """
    out = []
    for word, pred, stems in predictions_with_stems:
        agg = stem_probabilities(pred, stems)
        if len(agg) < min_stems:
            continue
        ranked = sorted(agg.items(), key=lambda it: (-it[1], it[0]))
        p1 = ranked[0][1]
        p2 = ranked[1][1] if len(ranked) > 1 else 0.0
        if p1 >= min_top and (p1 - p2) > min_gap and pred.entropy < max_entropy:
            out.append((word, ranked[0][0]))
    return out


# ---------------------------------------------------------------------------
# training and evaluation
# ---------------------------------------------------------------------------


def evaluate(model: Scorer, instances) -> float:
    """Stem-aggregated argmax accuracy over gold-labeled instances."""
    if not instances:
        raise ValidationError("cannot evaluate on an empty set")
    hits = 0
    total = 0
    for inst in instances:
        if inst.gold_stem is None:
            continue
        total += 1
        pred = model.score(inst.matrix())
        agg = stem_probabilities(pred, inst.stems())
        best = sorted(agg.items(), key=lambda it: (-it[1], it[0]))[0][0]
        if best == inst.gold_stem:
            hits += 1
    if total == 0:
        raise ValidationError("no gold-labeled instances to evaluate")
    return hits / total


def mean_loss(model: Scorer, instances) -> float:
    losses = []
    for inst in instances:
        if inst.gold_stem is None:
            continue
        pred = model.score(inst.matrix())
        losses.append(model.loss(pred, inst.gold_stem, inst.stems()))
    return float(np.mean(losses)) if losses else float("nan")


@dataclass
class MetricsLog:
    rows: list = field(default_factory=list)  # (epoch, split, loss, accuracy)

    def add(self, epoch, split_name, loss, accuracy):
        self.rows.append((epoch, split_name, loss, accuracy))

    def to_csv(self) -> str:
        lines = ["epoch,split,loss,accuracy"]
        for epoch, name, loss, acc in self.rows:
            lines.append(f"{epoch},{name},{repr(float(loss))},{repr(float(acc))}")
        return "\n".join(lines) + "\n"


def train(
    train_set,
    dev_set,
    config: TrainConfig = TrainConfig(),
    model: Optional[Scorer] = None,
    seed: int = 0,
):
    """Mini-batch ADAM training, optionally followed by a large-batch
    LAMB fine-tuning phase.  Returns (model, metrics log)."""
    train_set = [i for i in train_set if i.gold_stem is not None]
    if not train_set:
        raise ValidationError("empty training set")
    if model is None:
        model = Scorer()
    rng = np.random.default_rng(seed)
    metrics = MetricsLog()
    state = AdamState.for_model(model)
    t = 0

    def run_phase(epochs, batch_size, step_fn, phase_offset):
        nonlocal t
        order = np.arange(len(train_set))
        for epoch in range(1, epochs + 1):
            rng.shuffle(order)
            epoch_losses = []
            for lo in range(0, len(order), batch_size):
                batch = [
                    (train_set[i].matrix(), train_set[i].stems(), train_set[i].gold_stem)
                    for i in order[lo: lo + batch_size]
                ]
                t += 1
                loss, gw, gb = model.grad(batch)
                step_fn(model, gw, gb, state, t, lr=config.learning_rate)
                epoch_losses.append(loss)
            label = epoch + phase_offset
            metrics.add(label, "train", float(np.mean(epoch_losses)), evaluate(model, train_set))
            if dev_set:
                metrics.add(label, "dev", mean_loss(model, dev_set), evaluate(model, dev_set))
        return epochs

    done = run_phase(config.epochs, config.batch_size, adam_step, 0)
    if config.fine_tune:
        run_phase(config.fine_tune_epochs, config.fine_tune_batch, lamb_step, done)
    return model, metrics
