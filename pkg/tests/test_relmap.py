import numpy as np
import pytest

from mama_kg.oracle import OracleKG, load_oracle_tsv, save_oracle_tsv
from mama_kg.records import TokenAnnotation
from mama_kg.relmap import (
    RelationMap,
    build_relation_map,
    load_relation_map,
    map_relation,
    merge_relation_maps,
    normalize_phrase,
    rank_phrases,
    save_counts_tsv,
    write_curation_sheet,
)


def toks(*specs):
    out = []
    pos = 0
    for text, lemma, tag in specs:
        out.append(TokenAnnotation(text, lemma, tag, pos, pos + len(text)))
        pos += len(text) + 1
    return tuple(out)


def test_normalize_verb_survives():
    assert normalize_phrase(toks(("signed", "sign", "VERB"))) == "sign"


def test_normalize_aux_dropped():
    assert normalize_phrase(toks(("was", "be", "AUX"), ("signed", "sign", "VERB"))) == "sign"


def test_normalize_copula_fallback():
    assert normalize_phrase(toks(("is", "be", "AUX"))) == "be"


def test_normalize_empty_none():
    assert normalize_phrase(()) is None


def test_normalize_drops_adj_adv_det_punct():
    phrase = normalize_phrase(
        toks(
            ("quickly", "quickly", "ADV"),
            ("moved", "move", "VERB"),
            ("the", "the", "DET"),
            (",", ",", "PUNCT"),
            ("to", "to", "ADP"),
        )
    )
    assert phrase == "move to"


def test_normalize_idempotent_on_own_output():
    phrase = normalize_phrase(toks(("was", "be", "AUX"), ("signed", "sign", "VERB")))
    again = normalize_phrase(toks(*((w, w, "VERB") for w in phrase.split())))
    assert again == phrase


def test_build_counts_cooccurrence():
    oracle = OracleKG([("E1", "place_of_birth", "E2"), ("E3", "place_of_birth", "E4")])
    linked = [
        ("E1", "E2", "bear in"),
        ("E1", "E2", "bear in"),
        ("E3", "E4", "bear in"),
        ("E1", "E2", "sign"),
        (None, "E2", "bear in"),  # unlinked head contributes nothing
        ("E9", "E8", "bear in"),  # pair not in oracle
    ]
    rm = build_relation_map(linked, oracle)
    assert rm.counts[("bear in", "place_of_birth")] == 3
    assert rm.counts[("sign", "place_of_birth")] == 1


def test_build_empty_oracle():
    rm = build_relation_map([("E1", "E2", "x")], OracleKG([]))
    assert rm.counts == {}


def test_build_stream_order_invariant_and_mergeable():
    oracle = OracleKG([("A", "r1", "B"), ("C", "r2", "D")])
    rows = [("A", "B", "p"), ("C", "D", "q"), ("A", "B", "p"), ("C", "D", "p")]
    fwd = build_relation_map(rows, oracle)
    rev = build_relation_map(list(reversed(rows)), oracle)
    assert fwd.counts == rev.counts
    merged = merge_relation_maps(
        [build_relation_map(rows[:2], oracle), build_relation_map(rows[2:], oracle)]
    )
    assert merged.counts == fwd.counts


def test_per_pair_counting_flag():
    oracle = OracleKG([("A", "r1", "B")])
    rows = [("A", "B", "p")] * 5
    assert build_relation_map(rows, oracle).counts[("p", "r1")] == 5
    assert build_relation_map(rows, oracle, per_pair=True).counts[("p", "r1")] == 1


def test_rank_phrases_ordering():
    rm = RelationMap(counts={("a", "R"): 5, ("b", "R"): 3, ("c", "R"): 3})
    assert rank_phrases(rm, "R", 2) == ["a", "b"]
    assert rank_phrases(rm, "unknown") == []
    assert rank_phrases(rm, "R", 99) == ["a", "b", "c"]


def test_map_relation_requires_curation():
    rm = RelationMap(counts={("sign", "R"): 7})
    assert map_relation("sign", rm) is None
    rm2 = RelationMap(counts={("bear in", "place_of_birth"): 3}, curated={("bear in", "place_of_birth")})
    assert map_relation("bear in", rm2) == "place_of_birth"


def test_map_relation_argmax_count():
    rm = RelationMap(
        counts={("p", "r_hi"): 7, ("p", "r_lo"): 4},
        curated={("p", "r_hi"), ("p", "r_lo")},
    )
    assert map_relation("p", rm) == "r_hi"


def test_curated_must_be_subset_of_counts():
    with pytest.raises(ValueError):
        RelationMap(counts={}, curated={("ghost", "R")})


def test_planted_mapping_recovery():
    # deterministic 90/10 signal/noise, 5 planted relations
    planted = {f"phrase_{i}": f"rel_{i}" for i in range(5)}
    phrases = sorted(planted)
    oracle_facts = []
    rows = []
    for i, (phrase, rel) in enumerate(sorted(planted.items())):
        for j in range(20):
            h, t = f"H{i}_{j}", f"T{i}_{j}"
            oracle_facts.append((h, rel, t))
            noise = phrases[(i + 1 + j) % 5]
            rows.append((h, t, phrase if j < 18 else noise))
    rm = build_relation_map(rows, OracleKG(oracle_facts))
    for phrase, rel in planted.items():
        assert rank_phrases(rm, rel, 1) == [phrase]


def test_sheet_and_tsv_roundtrip(tmp_path):
    rm = RelationMap(counts={("bear in", "pob"): 9, ("sign", "pob"): 2, ("marry", "spouse"): 4})
    counts_p = tmp_path / "counts.tsv"
    sheet_p = tmp_path / "curation.tsv"
    save_counts_tsv(rm, counts_p)
    assert write_curation_sheet(rm, sheet_p, n=15) == 3
    # approve one row by editing the sheet like a human would
    lines = sheet_p.read_text().splitlines()
    lines = [
        line.replace("\t0", "\t1") if line.startswith("bear in\t") else line for line in lines
    ]
    sheet_p.write_text("\n".join(lines) + "\n")
    loaded = load_relation_map(counts_p, sheet_p)
    assert loaded.counts == rm.counts
    assert loaded.curated == {("bear in", "pob")}
    assert map_relation("bear in", loaded) == "pob"
    assert map_relation("sign", loaded) is None


def test_oracle_tsv_roundtrip(tmp_path):
    kg = OracleKG([("A", "r", "B"), ("C", "s", "D")])
    p = tmp_path / "oracle.tsv"
    save_oracle_tsv(kg, p)
    back = load_oracle_tsv(p)
    assert back.facts == kg.facts
    assert back.slots == kg.slots
