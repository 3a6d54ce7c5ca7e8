"""Entity linking: mention-to-entity dictionary plus word-embedding context
disambiguation. A mention links to the candidate with the best prior x
clamped-cosine score among candidates whose context similarity clears the
threshold; absence of a link is a value, not an error.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .records import NounChunk, SentenceRecord

DETERMINERS = ("a", "an", "the")
BARE_PRONOUNS = frozenset({"he", "she", "it", "they"})


class DimensionMismatch(Exception):
    """Word-vector rows disagree on dimensionality."""


@dataclass(frozen=True)
class EntityLink:
    entity_id: str
    prior: float
    context_sim: float
    score: float


class MentionDictionary:
    """normalized mention -> [(entity_id, prior)], priors descending."""

    def __init__(self, entries: Mapping[str, Sequence[tuple[str, float]]]):
        self._entries: dict[str, tuple[tuple[str, float], ...]] = {}
        for mention, cands in entries.items():
            best: dict[str, float] = {}
            for entity_id, prior in cands:
                if prior <= 0:
                    raise ValueError(f"prior for {entity_id!r} must be > 0")
                best[entity_id] = max(prior, best.get(entity_id, 0.0))
            ranked = sorted(best.items(), key=lambda ep: (-ep[1], ep[0]))
            self._entries[mention] = tuple(ranked)

    def candidates(self, mention: str) -> tuple[tuple[str, float], ...]:
        return self._entries.get(mention, ())

    def __len__(self) -> int:
        return len(self._entries)


class WordVectors:
    """Case-folded token -> float32 vector, all sharing one dimension."""

    def __init__(self, vectors: Mapping[str, np.ndarray]):
        self.dim: int | None = None
        self._vectors: dict[str, np.ndarray] = {}
        for token, vec in vectors.items():
            arr = np.asarray(vec, dtype=np.float32)
            if arr.ndim != 1:
                raise DimensionMismatch(f"vector for {token!r} is not 1-d")
            if self.dim is None:
                self.dim = arr.shape[0]
            elif arr.shape[0] != self.dim:
                raise DimensionMismatch(
                    f"vector for {token!r} has dim {arr.shape[0]}, expected {self.dim}"
                )
            self._vectors.setdefault(token.casefold(), arr)

    def get(self, token: str) -> np.ndarray | None:
        return self._vectors.get(token.casefold())

    def __contains__(self, token: str) -> bool:
        return token.casefold() in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)


def normalize_mention(surface: str) -> str:
    """Case-fold, collapse whitespace, strip one leading determiner."""
    words = surface.casefold().split()
    if len(words) > 1 and words[0] in DETERMINERS:
        words = words[1:]
    return " ".join(words)


def _mean_vector(tokens: Iterable[str], vectors: WordVectors) -> np.ndarray | None:
    vecs = [v for v in (vectors.get(t) for t in tokens) if v is not None]
    if not vecs:
        return None
    return np.mean(np.stack(vecs), axis=0, dtype=np.float64)


def context_similarity(
    context_tokens: Sequence[str], label_tokens: Sequence[str], vectors: WordVectors
) -> float:
    """Cosine between mean context vector and mean label vector; 0 when either
    side has no in-vocabulary token or a zero-norm mean."""
    ctx = _mean_vector(context_tokens, vectors)
    lab = _mean_vector(label_tokens, vectors)
    if ctx is None or lab is None:
        return 0.0
    nc, nl = float(np.linalg.norm(ctx)), float(np.linalg.norm(lab))
    if nc == 0.0 or nl == 0.0:
        return 0.0
    return float(np.dot(ctx, lab) / (nc * nl))


def link_mention(
    chunk: NounChunk,
    record: SentenceRecord,
    dictionary: MentionDictionary,
    vectors: WordVectors,
    labels: Mapping[str, str],
    tau_link: float = 0.25,
) -> EntityLink | None:
    """Best-scoring dictionary candidate whose context similarity clears
    tau_link, or None. Uses the coreference-resolved surface when present;
    bare unresolved pronouns never link."""
    surface = chunk.resolved_surface or chunk.surface
    if chunk.resolved_surface is None and surface.casefold().strip() in BARE_PRONOUNS:
        return None
    candidates = dictionary.candidates(normalize_mention(surface))
    if not candidates:
        return None
    context = [
        t.text
        for i, t in enumerate(record.tokens)
        if not (chunk.first_token <= i <= chunk.last_token)
    ]
    best: EntityLink | None = None
    best_key: tuple | None = None
    for entity_id, prior in candidates:
        label = labels.get(entity_id)
        sim = context_similarity(context, label.split(), vectors) if label else 0.0
        if sim < tau_link:
            continue
        score = prior * max(0.0, sim)
        key = (-score, -prior, entity_id)
        if best_key is None or key < best_key:
            best = EntityLink(entity_id=entity_id, prior=prior, context_sim=sim, score=score)
            best_key = key
    return best


def load_mention_dictionary(path: str | Path) -> MentionDictionary:
    """TSV: mention \\t entity_id \\t prior. Mentions are normalized on load."""
    entries: dict[str, list[tuple[str, float]]] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected mention\\tentity\\tprior")
            mention, entity_id, prior = parts
            entries.setdefault(normalize_mention(mention), []).append(
                (entity_id, float(prior))
            )
    return MentionDictionary(entries)


def load_word_vectors(path: str | Path) -> WordVectors:
    """Text format: token v1 v2 ... vd, space-separated."""
    vectors: dict[str, np.ndarray] = {}
    dim = None
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            parts = line.rstrip("\n").split(" ")
            if len(parts) < 2:
                continue
            token = parts[0]
            vec = np.array([float(x) for x in parts[1:]], dtype=np.float32)
            if dim is None:
                dim = vec.shape[0]
            elif vec.shape[0] != dim:
                raise DimensionMismatch(
                    f"{path}:{lineno}: vector dim {vec.shape[0]} != {dim}"
                )
            vectors.setdefault(token, vec)
    return WordVectors(vectors)


def load_entity_labels(path: str | Path) -> dict[str, str]:
    """TSV: entity_id \\t label."""
    labels: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected entity_id\\tlabel")
            labels.setdefault(parts[0], parts[1])
    return labels
