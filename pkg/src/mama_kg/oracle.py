"""Reference KG loaded from TSV, indexed for slot filling and pair lookup."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable


class OracleKG:
    def __init__(self, facts: Iterable[tuple[str, str, str]]):
        self.facts: frozenset[tuple[str, str, str]] = frozenset(facts)
        self.slots: dict[tuple[str, str], set[str]] = {}
        self.pair_relations: dict[tuple[str, str], set[str]] = {}
        for h, r, t in sorted(self.facts):
            self.slots.setdefault((h, r), set()).add(t)
            self.pair_relations.setdefault((h, t), set()).add(r)

    @property
    def num_slots(self) -> int:
        return len(self.slots)

    def __len__(self) -> int:
        return len(self.facts)


def load_oracle_tsv(path: str | Path) -> OracleKG:
    facts = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected head\\trelation\\ttail")
            facts.append(tuple(parts))
    return OracleKG(facts)


def save_oracle_tsv(kg: OracleKG, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for h, r, t in sorted(kg.facts):
            f.write(f"{h}\t{r}\t{t}\n")
