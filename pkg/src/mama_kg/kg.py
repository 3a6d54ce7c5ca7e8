"""Open-KG assembly: classify facts by how much of (head, relation, tail)
landed in the reference schema, deduplicate, index, export."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable

from .link import normalize_mention

MAPPED = "mapped"
PARTIALLY_UNMAPPED = "partially_unmapped"
COMPLETELY_UNMAPPED = "completely_unmapped"
CATEGORIES = (MAPPED, PARTIALLY_UNMAPPED, COMPLETELY_UNMAPPED)
_CATEGORY_RANK = {c: i for i, c in enumerate(CATEGORIES)}


def classify(head_entity: str | None, relation_kg: str | None, tail_entity: str | None) -> str:
    present = sum(x is not None for x in (head_entity, relation_kg, tail_entity))
    if present == 3:
        return MAPPED
    if present == 0:
        return COMPLETELY_UNMAPPED
    return PARTIALLY_UNMAPPED


@dataclass(frozen=True)
class OpenFact:
    category: str
    head_surface: str
    head_entity: str | None
    relation_surface: str
    relation_kg: str | None
    relation_normalized: str
    tail_surface: str
    tail_entity: str | None
    normalized_degree: float
    doc_id: str
    sent_id: int
    support: int = 1

    @property
    def provenance(self) -> tuple[str, int]:
        return (self.doc_id, self.sent_id)

    def key(self) -> tuple[str, str, str]:
        """Dedup identity: entity ids where present, else normalized surfaces."""
        head = self.head_entity or normalize_mention(self.head_surface)
        rel = self.relation_kg or self.relation_normalized
        tail = self.tail_entity or normalize_mention(self.tail_surface)
        return (head, rel, tail)


class OpenKG:
    def __init__(self, facts: Iterable[OpenFact]):
        self.facts: list[OpenFact] = sorted(
            facts, key=lambda f: (_CATEGORY_RANK[f.category], f.key())
        )
        self.by_category: dict[str, list[OpenFact]] = {c: [] for c in CATEGORIES}
        self.by_slot: dict[tuple[str | None, str | None], list[OpenFact]] = {}
        for f in self.facts:
            self.by_category[f.category].append(f)
            self.by_slot.setdefault((f.head_entity, f.relation_kg), []).append(f)

    def __len__(self) -> int:
        return len(self.facts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OpenKG):
            return NotImplemented
        return self.facts == other.facts


def make_open_fact(
    fact,
    head_link,
    tail_link,
    relation_normalized: str,
    relation_kg: str | None,
) -> OpenFact:
    """Compose one OpenFact from a kept CandidateFact plus link/map results."""
    head_entity = head_link.entity_id if head_link else None
    tail_entity = tail_link.entity_id if tail_link else None
    return OpenFact(
        category=classify(head_entity, relation_kg, tail_entity),
        head_surface=fact.head_surface,
        head_entity=head_entity,
        relation_surface=fact.relation_surface,
        relation_kg=relation_kg,
        relation_normalized=relation_normalized,
        tail_surface=fact.tail_surface,
        tail_entity=tail_entity,
        normalized_degree=fact.normalized_degree,
        doc_id=fact.doc_id,
        sent_id=fact.sent_id,
    )


def assemble(facts: Iterable[OpenFact]) -> OpenKG:
    """Deduplicate on the fact key, keeping the highest-degree witness and
    counting merged duplicates as support. Output order is canonical."""
    best: dict[tuple[str, str, str], OpenFact] = {}
    support: dict[tuple[str, str, str], int] = {}
    for f in facts:
        k = f.key()
        support[k] = support.get(k, 0) + f.support
        cur = best.get(k)
        if cur is None or _witness_order(f) < _witness_order(cur):
            best[k] = f
    merged = [replace(f, support=support[k]) for k, f in best.items()]
    return OpenKG(merged)


def _witness_order(f: OpenFact):
    return (-f.normalized_degree, f.doc_id, f.sent_id, f.head_surface, f.tail_surface)


def fact_to_obj(f: OpenFact) -> dict:
    return {
        "category": f.category,
        "head_surface": f.head_surface,
        "head_entity": f.head_entity,
        "relation_surface": f.relation_surface,
        "relation_kg": f.relation_kg,
        "relation_normalized": f.relation_normalized,
        "tail_surface": f.tail_surface,
        "tail_entity": f.tail_entity,
        "normalized_degree": f.normalized_degree,
        "doc_id": f.doc_id,
        "sent_id": f.sent_id,
        "support": f.support,
    }


def fact_from_obj(obj: dict) -> OpenFact:
    return OpenFact(**obj)


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def export(kg: OpenKG, fmt: str, sink: str | Path) -> int:
    """Write the KG as jsonl, tsv, or dot. Returns bytes written."""
    if fmt == "jsonl":
        payload = "".join(
            json.dumps(fact_to_obj(f), ensure_ascii=False, separators=(",", ":"), sort_keys=True)
            + "\n"
            for f in kg.facts
        )
    elif fmt == "tsv":
        rows = []
        for f in kg.facts:
            h, r, t = f.key()
            rows.append(f"{h}\t{r}\t{t}\t{f.category}\t{f.normalized_degree}")
        payload = "".join(row + "\n" for row in rows)
    elif fmt == "dot":
        lines = ["digraph open_kg {"]
        for f in kg.facts:
            h, r, t = f.key()
            schema = "fixed" if f.category == MAPPED else "open"
            lines.append(
                f'  "{_dot_escape(h)}" -> "{_dot_escape(t)}" '
                f'[label="{_dot_escape(r)}", schema={schema}];'
            )
        lines.append("}")
        payload = "\n".join(lines) + "\n"
    else:
        raise ValueError(f"unknown export format {fmt!r}")
    data = payload.encode("utf-8")
    with open(sink, "wb") as f:
        f.write(data)
    return len(data)


def load_kg_jsonl(path: str | Path) -> OpenKG:
    facts = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if line.strip():
                facts.append(fact_from_obj(json.loads(line)))
    return OpenKG(facts)
