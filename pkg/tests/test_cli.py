import json
from pathlib import Path

import pytest

from mama_kg.cli import PipelineConfig, StageError, main, record_partitions, run_pipeline
from mama_kg.kg import CATEGORIES, load_kg_jsonl
from mama_kg.synth import generate_bundle


@pytest.fixture(scope="module")
def bundle4(tmp_path_factory):
    root = tmp_path_factory.mktemp("bundle4")
    return generate_bundle(root, n_partitions=4, seed=7)


def make_config(bundle, out, **kw):
    return PipelineConfig(
        records=bundle.root,
        dictionary=bundle.dictionary,
        vectors=bundle.vectors,
        labels=bundle.labels,
        oracle=bundle.oracle,
        curation=bundle.curation,
        out=Path(out),
        **kw,
    )


def test_pipeline_stages_and_nonempty_kg(bundle4, tmp_path):
    manifest = run_pipeline(make_config(bundle4, tmp_path / "out"))
    assert [s["name"] for s in manifest["stages"]] == [
        "match", "stats", "filter", "link", "build-relmap",
        "map", "assemble", "export", "score",
    ]
    kg = load_kg_jsonl(tmp_path / "out" / "kg" / "open_kg.okg.jsonl")
    assert len(kg) > 0


def test_rerun_and_worker_counts_are_byte_identical(bundle4, tmp_path):
    outs = {}
    for name, workers in (("a", 1), ("b", 4), ("c", 1)):
        manifest = run_pipeline(make_config(bundle4, tmp_path / name, workers=workers))
        outs[name] = manifest
    assert outs["a"]["checksums"] == outs["b"]["checksums"] == outs["c"]["checksums"]
    kga = (tmp_path / "a" / "kg" / "open_kg.okg.jsonl").read_bytes()
    kgb = (tmp_path / "b" / "kg" / "open_kg.okg.jsonl").read_bytes()
    assert kga == kgb


def test_partition_count_invariance(tmp_path):
    final = {}
    for n in (1, 4):
        bundle = generate_bundle(tmp_path / f"bundle{n}", n_partitions=n, seed=7)
        run_pipeline(make_config(bundle, tmp_path / f"out{n}"))
        final[n] = (tmp_path / f"out{n}" / "kg" / "open_kg.okg.jsonl").read_bytes()
    assert final[1] == final[4]


def test_missing_dictionary_fails_fast(bundle4, tmp_path):
    cfg = make_config(bundle4, tmp_path / "out")
    cfg.dictionary = tmp_path / "nope.tsv"
    with pytest.raises(FileNotFoundError) as exc:
        run_pipeline(cfg)
    assert "dictionary" in str(exc.value) and "nope.tsv" in str(exc.value)
    assert not (tmp_path / "out" / "match").exists()


def test_empty_corpus_runs_clean(tmp_path, bundle4):
    empty = tmp_path / "empty"
    empty.mkdir()
    (empty / "part-00000.senrec.jsonl").write_text("")
    cfg = make_config(bundle4, tmp_path / "out")
    cfg.records = empty
    manifest = run_pipeline(cfg)
    kg = load_kg_jsonl(tmp_path / "out" / "kg" / "open_kg.okg.jsonl")
    assert len(kg) == 0
    assert manifest["stages"][0]["records"] == 0


def test_bad_record_logged_not_fatal(tmp_path, bundle4):
    records = tmp_path / "records"
    records.mkdir()
    src = bundle4.record_paths[0].read_text().splitlines()
    src.insert(1, "{broken json")
    (records / "part-00000.senrec.jsonl").write_text("\n".join(src) + "\n")
    cfg = make_config(bundle4, tmp_path / "out")
    cfg.records = records
    manifest = run_pipeline(cfg)
    assert manifest["stages"][0]["record_errors"] == 1
    assert manifest["stages"][0]["records"] == len(src) - 1


def test_match_subcommand_worker_equivalence(bundle4, tmp_path, capsys):
    for name, workers in (("w1", "1"), ("w4", "4")):
        rc = main([
            "match", "--records", str(bundle4.root),
            "--out", str(tmp_path / name), "--workers", workers,
        ])
        assert rc == 0
    concat = lambda d: b"".join(sorted(p.read_bytes() for p in sorted(Path(d).glob("*.cand.jsonl"))))
    assert concat(tmp_path / "w1") == concat(tmp_path / "w4")


def test_staged_subcommands_match_run(bundle4, tmp_path, capsys):
    # drive every stage through the CLI and compare with the one-shot run
    out = tmp_path / "staged"
    steps = [
        ["match", "--records", str(bundle4.root), "--out", str(out / "match")],
        ["stats", "--candidates", str(out / "match"), "--out", str(out / "stats.tsv")],
        ["filter", "--candidates", str(out / "match"), "--stats", str(out / "stats.tsv"),
         "--out", str(out / "filter")],
        ["link", "--kept", str(out / "filter"), "--records", str(bundle4.root),
         "--dictionary", str(bundle4.dictionary), "--vectors", str(bundle4.vectors),
         "--labels", str(bundle4.labels), "--out", str(out / "link")],
        ["build-relmap", "--linked", str(out / "link"), "--oracle", str(bundle4.oracle),
         "--out", str(out / "counts.tsv")],
        ["rank", "--counts", str(out / "counts.tsv"), "--out", str(out / "sheet.tsv")],
        ["map", "--linked", str(out / "link"), "--counts", str(out / "counts.tsv"),
         "--curation", str(bundle4.curation), "--out", str(out / "map")],
        ["assemble", "--mapped", str(out / "map"), "--out", str(out / "kg")],
        ["export", "--kg", str(out / "kg" / "open_kg.okg.jsonl"), "--format", "tsv",
         "--out", str(out / "kg" / "open_kg.okg.tsv")],
        ["score", "--kg", str(out / "kg" / "open_kg.okg.jsonl"), "--oracle",
         str(bundle4.oracle), "--out", str(out / "report.json")],
        ["sample-review", "--kg", str(out / "kg" / "open_kg.okg.jsonl"),
         "--out", str(out / "review.tsv"), "-n", "10", "--seed", "3"],
    ]
    for step in steps:
        assert main(step) == 0, step

    run_pipeline(make_config(bundle4, tmp_path / "oneshot"))
    staged_kg = (out / "kg" / "open_kg.okg.jsonl").read_bytes()
    oneshot_kg = (tmp_path / "oneshot" / "kg" / "open_kg.okg.jsonl").read_bytes()
    assert staged_kg == oneshot_kg

    report = json.loads((out / "report.json").read_text())["report"]
    assert report["precision"] == 1.0 and report["recall"] == 1.0

    review = (out / "review.tsv").read_text().splitlines()
    assert len(review) == 11  # header + 10 sampled rows
    assert review[0].startswith("doc_id\t")


def test_rank_sheet_lists_planted_phrases(bundle4, tmp_path):
    out = tmp_path / "o"
    run_pipeline(make_config(bundle4, out))
    sheet = tmp_path / "sheet.tsv"
    assert main(["rank", "--counts", str(out / "relmap" / "counts.tsv"),
                 "--out", str(sheet), "--top-n", "2"]) == 0
    body = sheet.read_text()
    assert "bear in\tplace_of_birth" in body
    assert "marry\tspouse" in body


def test_config_file_and_flag_priority(bundle4, tmp_path, capsys):
    cfg_file = tmp_path / "cfg.toml"
    cfg_file.write_text('beam_size = 2\ndegree_threshold = 0.01\nworkers = 1\n')
    out = tmp_path / "out"
    rc = main([
        "run", "--config", str(cfg_file),
        "--records", str(bundle4.root), "--dictionary", str(bundle4.dictionary),
        "--vectors", str(bundle4.vectors), "--labels", str(bundle4.labels),
        "--oracle", str(bundle4.oracle), "--curation", str(bundle4.curation),
        "--out", str(out), "--beam-size", "3",
    ])
    assert rc == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["beam_size"] == 3  # flag beats file
    assert manifest["config"]["degree_threshold"] == 0.01  # file beats default


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfg_file = tmp_path / "cfg.toml"
    cfg_file.write_text("beem_size = 2\n")
    rc = main(["match", "--config", str(cfg_file), "--records", "x", "--out", "y"])
    assert rc == 1
    assert "unknown config keys" in capsys.readouterr().err


def test_cli_error_exit_code(tmp_path, capsys):
    rc = main(["match", "--records", str(tmp_path / "missing"), "--out", str(tmp_path / "o")])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_record_partitions_file_and_dir(tmp_path, bundle4):
    assert record_partitions(bundle4.record_paths[0]) == [bundle4.record_paths[0]]
    assert record_partitions(bundle4.root) == sorted(bundle4.record_paths)
    assert record_partitions(tmp_path / "missing") == []


def test_match_single_partition_walkthrough_fixture(tmp_path, capsys):
    import sys

    sys.path.insert(0, str(Path(__file__).parent))
    from conftest import WALKTHROUGH_TOKENS, walkthrough_attention, make_record
    from mama_kg.records import write_records

    rec = make_record(WALKTHROUGH_TOKENS, [(0, 0), (3, 3)], walkthrough_attention(), doc_id="walkthrough")
    records = tmp_path / "records"
    records.mkdir()
    write_records([rec], records / "part-00000.senrec.jsonl")
    out = tmp_path / "cand"
    assert main(["match", "--records", str(records), "--out", str(out), "--beam-size", "1"]) == 0
    files = sorted(out.glob("*.cand.jsonl"))
    assert len(files) == 1
    rows = [json.loads(line) for line in files[0].read_text().splitlines()]
    triples = {(r["head_surface"], r["relation_surface"], r["tail_surface"]) for r in rows}
    assert ("Dylan", "is", "songwriter") in triples
