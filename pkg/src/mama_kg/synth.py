"""Seeded synthetic corpora with planted facts.

Two generators: `planted_linked_corpus` emits already-linked fact rows for
exercising the relation-map builder in isolation; `generate_bundle` writes a
complete on-disk input bundle (sentence records with crafted attention, a
mention dictionary, word vectors, entity labels, an oracle KG, and a curation
sheet) whose pipeline output is fully predictable: every planted path clears
the default filters, and the three fact categories are all populated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .oracle import OracleKG, save_oracle_tsv
from .records import (
    LAYOUT_REDUCED,
    AttentionTensor,
    NounChunk,
    SentenceRecord,
    TokenAnnotation,
    write_records,
)

FIRST_NAMES = ["Alice", "Tomas", "Nora", "Ravi", "Mina", "Oscar", "Lena", "Jacob"]
LAST_NAMES = ["Rivera", "Vance", "Quinn", "Sato", "Weaver", "Osei"]
UNLINKED_LAST_NAMES = ["Harder", "Klassen", "Friesen"]  # never enter the dictionary
CITIES = [
    "Berlin", "Lagos", "Osaka", "Quito", "Tbilisi", "Perth", "Reno",
    "Malmo", "Davao", "Tunis", "Bergen", "Cusco", "Adelaide", "Leipzig",
]
ORG_HEADS = ["Acme", "Zenith", "Borealis", "Helix", "Vertex", "Quasar", "Tundra"]
ORG_TAILS = ["Industries", "Labs", "Holdings", "Partners", "Systems", "Works", "Group"]
DESCRIPTORS = [
    "Mennonite", "Beekeeper", "Cartographer", "Locksmith", "Falconer",
    "Glassblower", "Archivist", "Chandler", "Cooper", "Fletcher",
    "Milliner", "Saddler", "Wainwright",
]


def person_name(i: int) -> str:
    return f"{FIRST_NAMES[i % len(FIRST_NAMES)]} {LAST_NAMES[(i // len(FIRST_NAMES)) % len(LAST_NAMES)]}"


def unlinked_person_name(i: int) -> str:
    return f"{FIRST_NAMES[i % len(FIRST_NAMES)]} {UNLINKED_LAST_NAMES[i % len(UNLINKED_LAST_NAMES)]}"


# (token text, lemma, POS) sequences planted between head and tail
TEMPLATE_BORN = [("was", "be", "AUX"), ("born", "bear", "VERB"), ("in", "in", "ADP")]
TEMPLATE_MARRIED = [("married", "marry", "VERB")]
TEMPLATE_SIGNED = [("signed", "sign", "VERB")]
TEMPLATE_WAS = [("was", "be", "AUX")]


def planted_linked_corpus(
    n_sentences: int = 100, n_relations: int = 5, signal: float = 0.9, seed: int = 0
):
    """Already-linked fact rows with an exact signal/noise phrase split.

    Returns (rows, oracle, planted) where rows are (head_entity, tail_entity,
    phrase) tuples, one per sentence, and planted maps each phrase to the
    relation it was planted for. Every head-tail pair is unique and present
    in the oracle under its relation.
    """
    phrases = [f"planted phrase {i}" for i in range(n_relations)]
    relations = [f"rel_{i}" for i in range(n_relations)]
    planted = dict(zip(phrases, relations))
    per_rel = n_sentences // n_relations
    n_signal = int(round(signal * per_rel))
    rng = np.random.default_rng(seed)
    rows = []
    oracle_facts = []
    for i, (phrase, rel) in enumerate(zip(phrases, relations)):
        for j in range(per_rel):
            h, t = f"H{i}_{j}", f"T{i}_{j}"
            oracle_facts.append((h, rel, t))
            if j < n_signal:
                emitted = phrase
            else:
                emitted = phrases[int(rng.integers(1, n_relations)) % n_relations]
                if emitted == phrase:
                    emitted = phrases[(i + 1) % n_relations]
            rows.append((h, t, emitted))
    return rows, OracleKG(oracle_facts), planted


@dataclass(frozen=True)
class PlantedSentence:
    doc_id: str
    head_surface: str
    tail_surface: str
    phrase: str
    relation: str | None  # oracle relation for mapped-family sentences


@dataclass
class Bundle:
    root: Path
    record_paths: list[Path]
    dictionary: Path
    vectors: Path
    labels: Path
    oracle: Path
    curation: Path
    sentences: list[PlantedSentence] = field(default_factory=list)


def _tokens_for(head: str, template, tail: str):
    specs = []
    for w in head.split():
        specs.append((w, w.lower(), "PROPN"))
    head_span = (0, len(specs) - 1)
    specs.extend(template)
    tail_first = len(specs)
    for k, w in enumerate(tail.split()):
        low = w.lower()
        if low in ("a", "an", "the"):
            specs.append((w, low, "DET"))
        elif k < len(tail.split()) - 1 and low == "registered":
            specs.append((w, "register", "ADJ"))
        else:
            specs.append((w, low, "PROPN"))
    tail_span = (tail_first, len(specs) - 1)
    specs.append((".", ".", "PUNCT"))
    toks = []
    pos = 0
    for text, lemma, tag in specs:
        toks.append(TokenAnnotation(text, lemma, tag, pos, pos + len(text)))
        pos += len(text) + 1
    return tuple(toks), head_span, tail_span


def _attention_for(n_tokens, head_span, tail_span, rng):
    a = np.zeros((n_tokens, n_tokens), dtype=np.float32)
    # faint background so junk paths exist but stay under the degree threshold
    n_noise = int(rng.integers(3, 8))
    for _ in range(n_noise):
        i, j = int(rng.integers(n_tokens)), int(rng.integers(n_tokens))
        a[i, j] = max(a[i, j], float(rng.uniform(0.0, 0.002)))
    # planted path: head edge -> each relation token -> tail edge
    path = [head_span[1], *range(head_span[1] + 1, tail_span[0]), tail_span[0]]
    for q, p in zip(path, path[1:]):
        a[p, q] = float(rng.uniform(0.3, 0.5))
    return a


def generate_bundle(outdir: str | Path, n_partitions: int = 1, seed: int = 0) -> Bundle:
    """Write a 50-sentence planted bundle under outdir.

    Families: 24 mapped-family sentences (two relations, entities linked,
    pairs in the oracle, phrases approved in the curation sheet), 13
    partially-unmapped (entities linked, phrase never curated), and 13
    completely-unmapped (entities absent from the dictionary).
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    sentences: list[PlantedSentence] = []
    records: list[SentenceRecord] = []
    dict_rows: list[tuple[str, str, float]] = []
    label_rows: dict[str, str] = {}
    oracle_facts: list[tuple[str, str, str]] = []
    entity_ids: dict[str, str] = {}

    def register(surface: str, kind: str) -> str:
        if surface not in entity_ids:
            eid = f"{kind}{len(entity_ids):03d}"
            entity_ids[surface] = eid
            dict_rows.append((surface, eid, 0.9))
            label_rows[eid] = surface
        return entity_ids[surface]

    def add_sentence(i, head, template, tail, phrase, relation, linkable):
        doc_id = f"doc{i:04d}"
        rng = np.random.default_rng([seed, 1000 + i])
        toks, head_span, tail_span = _tokens_for(head, template, tail)
        att = AttentionTensor(
            layout=LAYOUT_REDUCED,
            dim=len(toks),
            values=_attention_for(len(toks), head_span, tail_span, rng),
            layer_spec="last",
            reduction_applied="mean",
        )
        chunks = (
            NounChunk(head_span[0], head_span[1], head),
            NounChunk(tail_span[0], tail_span[1], tail),
        )
        text = " ".join(t.text for t in toks)
        records.append(
            SentenceRecord(
                doc_id=doc_id, sent_id=0, text=text, tokens=toks, chunks=chunks, attention=att
            )
        )
        if linkable:
            h_id = register(head, "P")
            t_kind = "P" if relation == "spouse" else ("C" if relation else "O")
            t_id = register(tail, t_kind)
            if relation:
                oracle_facts.append((h_id, relation, t_id))
        sentences.append(PlantedSentence(doc_id, head, tail, phrase, relation))

    i = 0
    for j in range(12):  # mapped family: place_of_birth
        add_sentence(
            i, person_name(j), TEMPLATE_BORN, CITIES[j], "bear in", "place_of_birth", True
        )
        i += 1
    for j in range(12):  # mapped family: spouse
        add_sentence(
            i, person_name(12 + j), TEMPLATE_MARRIED, person_name(24 + j), "marry", "spouse", True
        )
        i += 1
    for j in range(13):  # partially unmapped: linked pair, uncurated phrase
        org = f"{ORG_HEADS[j % 7]} {ORG_TAILS[(j // 7 + j) % 7]}"
        add_sentence(i, person_name(36 + j % 12), TEMPLATE_SIGNED, org, "sign", None, True)
        i += 1
    for j in range(13):  # completely unmapped: nothing in the dictionary
        desc = f"A Registered {DESCRIPTORS[j]}"
        add_sentence(i, unlinked_person_name(j), TEMPLATE_WAS, desc, "be", None, False)
        i += 1

    # partition record files by round-robin document index
    record_paths = []
    for p in range(n_partitions):
        path = outdir / f"part-{p:05d}.senrec.jsonl"
        write_records([r for k, r in enumerate(records) if k % n_partitions == p], path)
        record_paths.append(path)

    dictionary = outdir / "mentions.tsv"
    with open(dictionary, "w", encoding="utf-8") as f:
        for surface, eid, prior in dict_rows:
            f.write(f"{surface}\t{eid}\t{prior}\n")
            if eid.startswith("P"):  # low-prior distractor exercises ranking
                f.write(f"{surface}\t{eid}x\t0.05\n")

    labels = outdir / "labels.tsv"
    with open(labels, "w", encoding="utf-8") as f:
        for eid in sorted(label_rows):
            f.write(f"{eid}\t{label_rows[eid]}\n")
            f.write(f"{eid}x\t{label_rows[eid]}\n")

    vocab = sorted({t.text.casefold() for r in records for t in r.tokens})
    vectors = outdir / "vectors.txt"
    with open(vectors, "w", encoding="utf-8") as f:
        for w in vocab:
            f.write(f"{w} 1.0 0.0\n")

    oracle_path = outdir / "oracle.tsv"
    save_oracle_tsv(OracleKG(oracle_facts), oracle_path)

    curation = outdir / "curation.tsv"
    approved = {("bear in", "place_of_birth"), ("marry", "spouse")}
    with open(curation, "w", encoding="utf-8") as f:
        f.write("phrase\tkg_relation\tcount\tapproved\n")
        for phrase, rel in sorted(approved):
            f.write(f"{phrase}\t{rel}\t12\t1\n")

    return Bundle(
        root=outdir,
        record_paths=record_paths,
        dictionary=dictionary,
        vectors=vectors,
        labels=labels,
        oracle=oracle_path,
        curation=curation,
        sentences=sentences,
    )


def synthetic_fact_set(n: int = 1000, seed: int = 0):
    """Candidate facts with spread-out degrees, phrase frequencies, and
    contiguity for threshold-sweep experiments. Returns (facts, stats)."""
    from .filters import collect_stats
    from .match import CandidateFact

    rng = np.random.default_rng(seed)
    phrases = [("sign", "VERB", 40), ("bear in", "VERB", 25), ("rare", "VERB", 3)]
    facts = []
    for i in range(n):
        lemma, pos, spread = phrases[int(rng.integers(len(phrases)))]
        contiguous = rng.random() < 0.8
        positions = (2, 3) if contiguous else (2, 4)
        toks = tuple(
            TokenAnnotation(w, w, pos, 10 * k, 10 * k + len(w))
            for k, w in enumerate(lemma.split())
        )
        if len(toks) == 1:
            positions = (2,)
        degree = float(rng.uniform(0.0, 0.06))
        facts.append(
            CandidateFact(
                doc_id=f"d{i}",
                sent_id=0,
                head=NounChunk(0, 0, f"h{int(rng.integers(spread))}"),
                tail=NounChunk(6, 6, f"t{int(rng.integers(spread))}"),
                relation_positions=positions,
                relation_tokens=toks,
                raw_degree=degree * (len(positions) + 1),
                normalized_degree=degree,
                direction="forward",
            )
        )
    return facts, collect_stats(facts)
