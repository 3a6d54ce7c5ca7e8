"""Slot-filling evaluation of mapped facts against the oracle KG, plus a
seeded sampler that turns facts into a manual review sheet."""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .kg import OpenFact
from .oracle import OracleKG


@dataclass(frozen=True)
class ScoreReport:
    precision: float
    recall: float
    f1: float
    num_predictions: int
    num_correct: int
    num_oracle_slots_filled: int
    num_oracle_slots: int

    def to_dict(self) -> dict:
        return asdict(self)


def score_slot_filling(
    predictions: Iterable[tuple[str, str, str]],
    oracle: OracleKG,
    strict_precision: bool = False,
) -> ScoreReport:
    """Score deduplicated (head_entity, relation, tail_entity) predictions.

    A prediction is correct when its (head, relation) is an oracle slot and
    its tail is in that slot's gold set. Precision divides by the on-slot
    predictions; strict_precision divides by all predictions instead (counting
    off-slot ones wrong). Recall is the fraction of oracle slots with at least
    one correct fill. Zero denominators score 0.
    """
    preds = set(predictions)
    on_slot = {p for p in preds if (p[0], p[1]) in oracle.slots}
    correct = {p for p in on_slot if p[2] in oracle.slots[(p[0], p[1])]}
    filled_slots = {(h, r) for h, r, _ in correct}

    denominator = len(preds) if strict_precision else len(on_slot)
    precision = len(correct) / denominator if denominator else 0.0
    recall = len(filled_slots) / oracle.num_slots if oracle.num_slots else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return ScoreReport(
        precision=precision,
        recall=recall,
        f1=f1,
        num_predictions=denominator,
        num_correct=len(correct),
        num_oracle_slots_filled=len(filled_slots),
        num_oracle_slots=oracle.num_slots,
    )


REVIEW_COLUMNS = ("doc_id", "sent_id", "head", "relation", "tail", "category", "verdict")


def sample_for_review(
    facts: Sequence[OpenFact], n: int, seed: int
) -> list[tuple[str, int, str, str, str, str, str]]:
    """Seeded uniform sample without replacement, grouped by doc_id, with an
    empty verdict column. n beyond the population returns everything."""
    if n < 0:
        raise ValueError("n must be >= 0")
    population = sorted(facts, key=lambda f: (f.doc_id, f.sent_id, f.key()))
    rng = random.Random(seed)
    chosen = population if n >= len(population) else rng.sample(population, n)
    chosen = sorted(chosen, key=lambda f: (f.doc_id, f.sent_id, f.key()))
    rows = []
    for f in chosen:
        h, r, t = f.key()
        rows.append((f.doc_id, f.sent_id, h, r, t, f.category, ""))
    return rows


def write_review_sheet(rows: Iterable[tuple], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("\t".join(REVIEW_COLUMNS) + "\n")
        for row in rows:
            f.write("\t".join(str(x) for x in row) + "\n")
