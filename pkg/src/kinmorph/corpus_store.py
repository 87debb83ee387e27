"""Word embeddings, corpus frequency tables and lexicon membership."""

from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import ParseError, ValidationError

log = logging.getLogger(__name__)


@dataclass
class EmbeddingTable:
    dim: int
    entries: dict[str, np.ndarray] = field(default_factory=dict)

    def __contains__(self, word):
        return word in self.entries

    def vector(self, word) -> Optional[np.ndarray]:
        return self.entries.get(word)

    def angular_similarity(self, x: str, y: str) -> Optional[float]:
        """1 - arccos(cosine)/pi, in [0, 1]; None when either word is OOV."""
        vx = self.entries.get(x)
        vy = self.entries.get(y)
        if vx is None or vy is None:
            return None
        cos = float(np.dot(vx, vy) / (np.linalg.norm(vx) * np.linalg.norm(vy)))
        cos = max(-1.0, min(1.0, cos))
        return 1.0 - math.acos(cos) / math.pi


def load_embeddings(source) -> EmbeddingTable:
    """Text vector format: a ``vocab_size dim`` header, then one
    ``word v1 ... vdim`` row per word."""
    if isinstance(source, str):
        source = io.StringIO(source)
    header = source.readline().split()
    if len(header) != 2:
        raise ParseError("embedding header must be 'vocab_size dim'", line=1)
    size, dim = int(header[0]), int(header[1])
    table = EmbeddingTable(dim=dim)
    for lineno, raw in enumerate(source, start=2):
        if not raw.strip():
            continue
        parts = raw.split()
        if len(parts) != dim + 1:
            raise ParseError(
                f"expected {dim + 1} fields, got {len(parts)}", line=lineno
            )
        word = parts[0]
        if word in table.entries:
            raise ValidationError(f"duplicate embedding for {word!r} (line {lineno})")
        vec = np.asarray([float(v) for v in parts[1:]], dtype=np.float64)
        if not vec.any():
            raise ValidationError(f"zero vector for {word!r} (line {lineno})")
        table.entries[word] = vec
    if len(table.entries) != size:
        raise ParseError(
            f"header promised {size} words, file has {len(table.entries)}"
        )
    return table


@dataclass
class FrequencyTable:
    counts: dict[str, tuple[int, int]] = field(default_factory=dict)

    def counts_for(self, word: str) -> tuple[int, int]:
        """(token_count, document_count); unseen words count as (0, 0)."""
        return self.counts.get(word, (0, 0))

    def serialize(self) -> str:
        lines = [f"{w}\t{tc}\t{dc}" for w, (tc, dc) in sorted(self.counts.items())]
        return "\n".join(lines) + ("\n" if lines else "")


def load_frequencies(source) -> FrequencyTable:
    if isinstance(source, str):
        source = io.StringIO(source)
    table = FrequencyTable()
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError("expected word<TAB>tokens<TAB>docs", line=lineno)
        word, tc, dc = parts[0], int(parts[1]), int(parts[2])
        if dc > tc:
            raise ValidationError(f"document count exceeds token count for {word!r}")
        table.counts[word] = (tc, dc)
    return table


def ingest_corpus(documents: Iterable[Iterable[str]]) -> FrequencyTable:
    """Exact token and document counts over a stream of token streams."""
    token_counts: dict[str, int] = {}
    doc_counts: dict[str, int] = {}
    for doc in documents:
        seen = set()
        for token in doc:
            token_counts[token] = token_counts.get(token, 0) + 1
            seen.add(token)
        for token in seen:
            doc_counts[token] = doc_counts.get(token, 0) + 1
    table = FrequencyTable()
    for word, tc in token_counts.items():
        table.counts[word] = (tc, doc_counts.get(word, 0))
    return table


@dataclass
class Lexicon:
    name: str
    stems: frozenset[str]

    def __contains__(self, stem):
        return stem in self.stems


def load_lexicon(name: str, source) -> Lexicon:
    if isinstance(source, str):
        source = io.StringIO(source)
    stems = set()
    for raw in source:
        line = raw.split("#", 1)[0].strip()
        if line:
            stems.add(line)
    return Lexicon(name=name, stems=frozenset(stems))


def check_lexicon_nesting(small: Lexicon, large: Lexicon) -> bool:
    """The small lexicon should nest inside the large one; warn when not."""
    stray = small.stems - large.stems
    if stray:
        log.warning(
            "small lexicon has %d stems missing from the large one (e.g. %s)",
            len(stray),
            sorted(stray)[0],
        )
        return False
    return True


@dataclass
class Stores:
    """Bundle handed to feature assembly."""

    embeddings: Optional[EmbeddingTable] = None
    frequencies: Optional[FrequencyTable] = None
    lexicon_small: Optional[Lexicon] = None
    lexicon_large: Optional[Lexicon] = None

    def angular_similarity(self, x, y):
        if self.embeddings is None:
            return None
        return self.embeddings.angular_similarity(x, y)

    def counts(self, word):
        if self.frequencies is None:
            return (0, 0)
        return self.frequencies.counts_for(word)

    def vocab_test(self):
        if self.embeddings is None:
            return lambda w: True
        return lambda w: w in self.embeddings
