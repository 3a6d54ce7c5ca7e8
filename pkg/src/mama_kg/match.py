"""Match stage: head-tail pair enumeration and beam search over attention.

The search walks the reduced attention matrix from the head chunk toward the
tail chunk, one token per step. A step onto position p from the current
position q scores attention[p][q] (p attends to q). Landing on the tail's
near edge completes a candidate: the tail's step score is added to the
degree, but the tail token itself is not part of the relation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .records import (
    LAYOUT_REDUCED,
    AttentionTensor,
    NounChunk,
    SentenceRecord,
    TokenAnnotation,
    reduce_attention,
)

FORWARD = "forward"
BACKWARD = "backward"


@dataclass(frozen=True)
class MatchConfig:
    beam_size: int = 6
    max_relation_len: int = 8  # search-tree depth bound, terminal hop included
    normalize_by_length: bool = True
    max_pair_token_gap: int | None = None
    head_reduction: str = "mean"  # applied only to per-head records

    def __post_init__(self):
        if self.beam_size < 1:
            raise ValueError("beam_size must be >= 1")
        if self.max_relation_len < 1:
            raise ValueError("max_relation_len must be >= 1")


@dataclass(frozen=True)
class BeamCandidate:
    """One beam entry. query_pos is the last accepted token: the head edge at
    start, then the newest relation token. Completion does not move it.

    Degrees accumulate in float32, one rounding per step, matching the f32
    attention payload; the stored value is the exact float64 image."""

    query_pos: int
    relation_positions: tuple[int, ...]
    degree: float
    complete: bool


@dataclass(frozen=True)
class CandidateFact:
    doc_id: str
    sent_id: int
    head: NounChunk
    tail: NounChunk
    relation_positions: tuple[int, ...]  # search order (descending if backward)
    relation_tokens: tuple[TokenAnnotation, ...]  # always sentence order
    raw_degree: float
    normalized_degree: float
    direction: str

    @property
    def head_surface(self) -> str:
        return self.head.surface

    @property
    def tail_surface(self) -> str:
        return self.tail.surface

    @property
    def relation_surface(self) -> str:
        return " ".join(t.text for t in self.relation_tokens)


def enumerate_pairs(
    record: SentenceRecord, cfg: MatchConfig
) -> list[tuple[NounChunk, NounChunk, str]]:
    """All ordered pairs of distinct chunks, with direction and gap filter,
    sorted by (head.first_token, tail.first_token)."""
    pairs = []
    for head in record.chunks:
        for tail in record.chunks:
            if head is tail:
                continue
            if head.first_token < tail.first_token:
                direction = FORWARD
                gap = tail.first_token - head.last_token
            else:
                direction = BACKWARD
                gap = head.first_token - tail.last_token
            if cfg.max_pair_token_gap is not None and gap > cfg.max_pair_token_gap:
                continue
            pairs.append((head, tail, direction))
    pairs.sort(key=lambda p: (p[0].first_token, p[1].first_token))
    return pairs


def _beam_sort_key(c: BeamCandidate):
    # degree desc, then smaller newest-position index, then shorter relation;
    # complete-before-growing and the positions tuple make the order total.
    return (
        -c.degree,
        c.query_pos,
        len(c.relation_positions),
        0 if c.complete else 1,
        c.relation_positions,
    )


def beam_search(
    head: NounChunk,
    tail: NounChunk,
    record: SentenceRecord,
    attention: AttentionTensor,
    cfg: MatchConfig,
    counters: dict | None = None,
) -> list[CandidateFact]:
    """Top-k candidate facts for one head-tail pair, best normalized degree
    first. An empty list means no path with at least one relation token
    reached the tail within the depth bound."""
    if attention.layout != LAYOUT_REDUCED:
        raise ValueError("beam_search requires reduced attention")
    if head == tail:
        raise ValueError("head and tail must be distinct chunks")
    values = attention.values
    forward = head.first_token < tail.first_token
    if forward:
        start = head.last_token
        tail_edge = tail.first_token
    else:
        start = head.first_token
        tail_edge = tail.last_token

    beam = [BeamCandidate(start, (), 0.0, False)]
    for _depth in range(cfg.max_relation_len):
        growing = [c for c in beam if not c.complete]
        if not growing:
            break
        new_beam = [c for c in beam if c.complete]
        for c in growing:
            q = c.query_pos
            if forward:
                nexts: Iterable[int] = range(q + 1, tail_edge + 1)
                steps = values[q + 1 : tail_edge + 1, q]
            else:
                nexts = range(q - 1, tail_edge - 1, -1)
                steps = values[tail_edge:q, q][::-1]
            degrees = (np.float32(c.degree) + steps).tolist()
            if counters is not None:
                counters["yield_evaluations"] = counters.get("yield_evaluations", 0) + len(degrees)
            for p, d in zip(nexts, degrees):
                if p == tail_edge:
                    new_beam.append(BeamCandidate(q, c.relation_positions, d, True))
                else:
                    new_beam.append(BeamCandidate(p, c.relation_positions + (p,), d, False))
        new_beam.sort(key=_beam_sort_key)
        beam = new_beam[: cfg.beam_size]

    completed = [c for c in beam if c.complete and c.relation_positions]
    facts = [_to_fact(c, head, tail, record, cfg, FORWARD if forward else BACKWARD) for c in completed]
    facts.sort(
        key=lambda f: (
            -f.normalized_degree,
            f.relation_positions[-1],
            len(f.relation_positions),
            f.relation_positions,
        )
    )
    return facts


def _to_fact(
    c: BeamCandidate,
    head: NounChunk,
    tail: NounChunk,
    record: SentenceRecord,
    cfg: MatchConfig,
    direction: str,
) -> CandidateFact:
    norm = c.degree / (len(c.relation_positions) + 1) if cfg.normalize_by_length else c.degree
    return CandidateFact(
        doc_id=record.doc_id,
        sent_id=record.sent_id,
        head=head,
        tail=tail,
        relation_positions=c.relation_positions,
        relation_tokens=tuple(record.tokens[p] for p in sorted(c.relation_positions)),
        raw_degree=c.degree,
        normalized_degree=norm,
        direction=direction,
    )


def replay_degree(fact: CandidateFact, attention: AttentionTensor) -> float:
    """Re-sum the step scores along the fact's path; equals raw_degree exactly
    (same chained float32 accumulation as the search)."""
    if fact.direction == FORWARD:
        path = [fact.head.last_token, *fact.relation_positions, fact.tail.first_token]
    else:
        path = [fact.head.first_token, *fact.relation_positions, fact.tail.last_token]
    total = np.float32(0.0)
    for cur, nxt in zip(path, path[1:]):
        total = total + attention.values[nxt, cur]
    return float(total)


def match_sentence(
    record: SentenceRecord, cfg: MatchConfig, counters: dict | None = None
) -> list[CandidateFact]:
    """All candidate facts of a sentence: pair order, then beam rank."""
    att = record.attention
    if att.layout != LAYOUT_REDUCED:
        att = reduce_attention(att, cfg.head_reduction)
    out: list[CandidateFact] = []
    for head, tail, _direction in enumerate_pairs(record, cfg):
        out.extend(beam_search(head, tail, record, att, cfg, counters))
    return out


def _chunk_to_obj(ch: NounChunk) -> dict:
    obj = {"first_token": ch.first_token, "last_token": ch.last_token, "surface": ch.surface}
    if ch.resolved_surface is not None:
        obj["resolved_surface"] = ch.resolved_surface
    return obj


def _chunk_from_obj(obj: dict) -> NounChunk:
    return NounChunk(
        first_token=obj["first_token"],
        last_token=obj["last_token"],
        surface=obj["surface"],
        resolved_surface=obj.get("resolved_surface"),
    )


def fact_to_obj(fact: CandidateFact) -> dict:
    return {
        "doc_id": fact.doc_id,
        "sent_id": fact.sent_id,
        "head": _chunk_to_obj(fact.head),
        "tail": _chunk_to_obj(fact.tail),
        "relation_positions": list(fact.relation_positions),
        "relation_tokens": [
            {
                "text": t.text,
                "lemma": t.lemma,
                "pos": t.pos,
                "char_start": t.char_start,
                "char_end": t.char_end,
            }
            for t in fact.relation_tokens
        ],
        "raw_degree": fact.raw_degree,
        "normalized_degree": fact.normalized_degree,
        "direction": fact.direction,
        "head_surface": fact.head_surface,
        "relation_surface": fact.relation_surface,
        "tail_surface": fact.tail_surface,
    }


def fact_from_obj(obj: dict) -> CandidateFact:
    return CandidateFact(
        doc_id=obj["doc_id"],
        sent_id=obj["sent_id"],
        head=_chunk_from_obj(obj["head"]),
        tail=_chunk_from_obj(obj["tail"]),
        relation_positions=tuple(obj["relation_positions"]),
        relation_tokens=tuple(
            TokenAnnotation(
                text=t["text"],
                lemma=t["lemma"],
                pos=t["pos"],
                char_start=t["char_start"],
                char_end=t["char_end"],
            )
            for t in obj["relation_tokens"]
        ),
        raw_degree=obj["raw_degree"],
        normalized_degree=obj["normalized_degree"],
        direction=obj["direction"],
    )


def fact_to_json(fact: CandidateFact) -> str:
    return json.dumps(fact_to_obj(fact), ensure_ascii=False, separators=(",", ":"), sort_keys=True)


def fact_from_json(line: str) -> CandidateFact:
    return fact_from_obj(json.loads(line))
