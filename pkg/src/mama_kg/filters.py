"""Candidate-fact constraints: degree threshold, distinct-pair frequency,
relation contiguity. The distinct-pair constraint needs a corpus-wide stats
pass first; stats merge commutatively so partitions can aggregate in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from .match import CandidateFact
from .relmap import normalize_phrase

CONSTRAINT_DEGREE = "constraint1"
CONSTRAINT_DISTINCT = "constraint2"
CONSTRAINT_CONTIGUOUS = "constraint3"


@dataclass(frozen=True)
class FilterConfig:
    degree_threshold: float = 0.005
    min_distinct_pairs: int = 10
    require_contiguous: bool = True

    def __post_init__(self):
        if self.degree_threshold < 0:
            raise ValueError("degree_threshold must be >= 0")
        if self.min_distinct_pairs < 1:
            raise ValueError("min_distinct_pairs must be >= 1")


class RelationStats:
    """Distinct (head_surface, tail_surface) pairs per normalized relation phrase.

    Either pair-backed (mergeable, exact sets) or count-backed (reloaded from
    the persisted TSV, counts only).
    """

    def __init__(self):
        self._pairs: dict[str, set[tuple[str, str]]] = {}
        self._counts: dict[str, int] | None = None

    @classmethod
    def from_counts(cls, counts: dict[str, int]) -> "RelationStats":
        st = cls()
        st._counts = dict(counts)
        return st

    def add(self, phrase: str, head_surface: str, tail_surface: str) -> None:
        if self._counts is not None:
            raise TypeError("count-backed stats are frozen")
        self._pairs.setdefault(phrase, set()).add((head_surface, tail_surface))

    def merge(self, other: "RelationStats") -> "RelationStats":
        if self._counts is not None or other._counts is not None:
            raise TypeError("only pair-backed stats can merge")
        for phrase, pairs in other._pairs.items():
            self._pairs.setdefault(phrase, set()).update(pairs)
        return self

    def distinct_pairs(self, phrase: str) -> int:
        if self._counts is not None:
            return self._counts.get(phrase, 0)
        return len(self._pairs.get(phrase, ()))

    def counts(self) -> dict[str, int]:
        if self._counts is not None:
            return dict(self._counts)
        return {p: len(s) for p, s in self._pairs.items()}

    def __len__(self) -> int:
        return len(self._counts if self._counts is not None else self._pairs)


def check_contiguous(fact: CandidateFact) -> bool:
    """Constraint #3: relation positions sorted ascending form consecutive ints."""
    ps = sorted(fact.relation_positions)
    return all(b == a + 1 for a, b in zip(ps, ps[1:]))


def collect_stats(
    facts: Iterable[CandidateFact],
    normalizer: Callable[[tuple], str | None] = normalize_phrase,
) -> RelationStats:
    """One aggregation pass over candidate facts; phrases are normalized
    before counting so inflectional variants share one entry."""
    stats = RelationStats()
    for fact in facts:
        phrase = normalizer(fact.relation_tokens)
        if phrase is None:
            continue
        stats.add(phrase, fact.head_surface, fact.tail_surface)
    return stats


def apply_filters(
    facts: Iterable[CandidateFact],
    stats: RelationStats,
    cfg: FilterConfig,
    normalizer: Callable[[tuple], str | None] = normalize_phrase,
) -> tuple[list[CandidateFact], list[tuple[CandidateFact, str]]]:
    """Partition facts into (kept, rejected-with-reason). The reason is the
    first failing constraint in order #1, #2, #3."""
    kept: list[CandidateFact] = []
    rejected: list[tuple[CandidateFact, str]] = []
    for fact in facts:
        if fact.normalized_degree < cfg.degree_threshold:
            rejected.append((fact, CONSTRAINT_DEGREE))
            continue
        phrase = normalizer(fact.relation_tokens)
        n_pairs = stats.distinct_pairs(phrase) if phrase is not None else 0
        if n_pairs < cfg.min_distinct_pairs:
            rejected.append((fact, CONSTRAINT_DISTINCT))
            continue
        if cfg.require_contiguous and not check_contiguous(fact):
            rejected.append((fact, CONSTRAINT_CONTIGUOUS))
            continue
        kept.append(fact)
    return kept, rejected


def save_stats(stats: RelationStats, path: str | Path) -> None:
    counts = stats.counts()
    with open(path, "w", encoding="utf-8") as f:
        for phrase in sorted(counts):
            f.write(f"{phrase}\t{counts[phrase]}\n")


def load_stats(path: str | Path) -> RelationStats:
    counts: dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            phrase, count = line.rstrip("\n").split("\t")
            counts[phrase] = int(count)
    return RelationStats.from_counts(counts)
