"""Relation-phrase normalization and the offline phrase -> KG-relation map.

The map is built from co-occurrence: when a candidate fact's linked head-tail
pair also appears in the oracle KG under some relation, that relation and the
fact's normalized phrase co-occur once. A human review sheet (top-n phrases
per relation) gates which pairs the final mapping may use.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .oracle import OracleKG

# POS tags whose tokens are dropped from relation phrases. The inflection
# carriers (AUX), modifiers (ADJ, ADV), plus DET and PUNCT which show up in
# raw relations but carry no KG semantics.
PHRASE_DROP_POS = frozenset({"AUX", "ADJ", "ADV", "DET", "PUNCT"})


def normalize_phrase(tokens: Sequence) -> str | None:
    """Lowercased lemmas of the kept tokens, space-joined.

    If every token is droppable (e.g. a bare copula), falls back to the
    lemmas of all tokens so "is" normalizes to "be" instead of vanishing.
    Returns None only for an empty token list.
    """
    if not tokens:
        return None
    kept = [t for t in tokens if t.pos not in PHRASE_DROP_POS]
    if not kept:
        kept = list(tokens)
    return " ".join(t.lemma.lower() for t in kept)


@dataclass
class RelationMap:
    counts: dict[tuple[str, str], int] = field(default_factory=dict)
    curated: set[tuple[str, str]] = field(default_factory=set)

    def __post_init__(self):
        missing = self.curated - set(self.counts)
        if missing:
            raise ValueError(f"curated pairs absent from counts: {sorted(missing)[:3]}")


def build_relation_map(
    linked_facts: Iterable[tuple[str | None, str | None, str]],
    oracle: OracleKG,
    per_pair: bool = False,
) -> RelationMap:
    """Count (phrase, kg_relation) co-occurrences over linked candidate facts.

    linked_facts yields (head_entity, tail_entity, normalized_phrase); facts
    missing either link are skipped. per_pair counts each distinct
    (phrase, relation, head, tail) combination once instead of once per fact.
    """
    counts: dict[tuple[str, str], int] = {}
    seen: set[tuple[str, str, str, str]] = set()
    for h_k, t_k, phrase in linked_facts:
        if h_k is None or t_k is None or phrase is None:
            continue
        for r_k in oracle.pair_relations.get((h_k, t_k), ()):
            if per_pair:
                key4 = (phrase, r_k, h_k, t_k)
                if key4 in seen:
                    continue
                seen.add(key4)
            key = (phrase, r_k)
            counts[key] = counts.get(key, 0) + 1
    return RelationMap(counts=counts)


def merge_relation_maps(maps: Iterable[RelationMap]) -> RelationMap:
    counts: dict[tuple[str, str], int] = {}
    for m in maps:
        for key, n in m.counts.items():
            counts[key] = counts.get(key, 0) + n
    return RelationMap(counts=counts)


def rank_phrases(relmap: RelationMap, kg_relation: str, n: int = 15) -> list[str]:
    """Top-n phrases for one KG relation, count descending, ties lexicographic."""
    rows = [(phrase, c) for (phrase, rel), c in relmap.counts.items() if rel == kg_relation]
    rows.sort(key=lambda pc: (-pc[1], pc[0]))
    return [phrase for phrase, _ in rows[:n]]


def map_relation(phrase: str | None, relmap: RelationMap) -> str | None:
    """Curated KG relation for a phrase: highest count, ties lexicographic.
    None when no curated pair covers the phrase (the fact stays open-schema)."""
    if phrase is None:
        return None
    best: tuple[int, str] | None = None
    for (p, rel) in relmap.curated:
        if p != phrase:
            continue
        cand = (-relmap.counts[(p, rel)], rel)
        if best is None or cand < best:
            best = cand
    return best[1] if best else None


def save_counts_tsv(relmap: RelationMap, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for (phrase, rel) in sorted(relmap.counts):
            f.write(f"{phrase}\t{rel}\t{relmap.counts[(phrase, rel)]}\n")


def load_counts_tsv(path: str | Path) -> dict[tuple[str, str], int]:
    counts: dict[tuple[str, str], int] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected phrase\\trelation\\tcount")
            counts[(parts[0], parts[1])] = int(parts[2])
    return counts


def write_curation_sheet(relmap: RelationMap, path: str | Path, n: int = 15) -> int:
    """Review sheet: top-n phrases per relation, approval column all 0.
    Humans flip approved to 1; load_relation_map picks the approvals up."""
    relations = sorted({rel for (_, rel) in relmap.counts})
    rows = 0
    with open(path, "w", encoding="utf-8") as f:
        f.write("phrase\tkg_relation\tcount\tapproved\n")
        for rel in relations:
            for phrase in rank_phrases(relmap, rel, n):
                f.write(f"{phrase}\t{rel}\t{relmap.counts[(phrase, rel)]}\t0\n")
                rows += 1
    return rows


def load_curation_sheet(path: str | Path) -> set[tuple[str, str]]:
    curated: set[tuple[str, str]] = set()
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline()
        if not header.startswith("phrase\t"):
            raise ValueError(f"{path}: missing curation sheet header")
        for lineno, line in enumerate(f, 2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 columns")
            if parts[3] == "1":
                curated.add((parts[0], parts[1]))
    return curated


def load_relation_map(
    counts_path: str | Path, curation_path: str | Path | None = None
) -> RelationMap:
    """Load counts plus approvals. Approved pairs with no count in this run
    (the sheet may come from a larger corpus) are dropped with a warning,
    keeping the curated-subset-of-counts invariant constructively."""
    counts = load_counts_tsv(counts_path)
    curated = load_curation_sheet(curation_path) if curation_path else set()
    unknown = curated - set(counts)
    if unknown:
        logging.getLogger("mama_kg").warning(
            "%d curated pairs have no co-occurrence counts in this run: %s",
            len(unknown),
            sorted(unknown)[:5],
        )
        curated = curated & set(counts)
    return RelationMap(counts=counts, curated=curated)
