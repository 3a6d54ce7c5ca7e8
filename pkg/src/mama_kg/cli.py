"""Pipeline orchestration and the command-line tool.

Every stage reads and writes plain files in the documented formats, so each
subcommand can be re-run independently; `run` chains them all and writes a
manifest with the config hash, stage timings, and input/output checksums.
Parallelism is partition-level only: worker count never changes an output byte.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from . import filters, kg, link, relmap, scoring
from .match import CandidateFact, MatchConfig, fact_from_obj, fact_to_obj, match_sentence
from .oracle import load_oracle_tsv
from .records import RecordError, read_records

log = logging.getLogger("mama_kg")


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PipelineConfig:
    records: Path
    dictionary: Path
    vectors: Path
    labels: Path
    oracle: Path
    out: Path
    curation: Path | None = None
    relmap_counts: Path | None = None  # reuse precomputed counts, skip build-relmap
    beam_size: int = 6
    max_relation_len: int = 8
    normalize_by_length: bool = True
    max_pair_token_gap: int | None = None
    head_reduction: str = "mean"
    degree_threshold: float = 0.005
    min_distinct_pairs: int = 10
    require_contiguous: bool = True
    link_threshold: float = 0.25
    per_pair_counts: bool = False
    strict_precision: bool = False
    workers: int = 1
    seed: int = 0

    def match_config(self) -> MatchConfig:
        return MatchConfig(
            beam_size=self.beam_size,
            max_relation_len=self.max_relation_len,
            normalize_by_length=self.normalize_by_length,
            max_pair_token_gap=self.max_pair_token_gap,
            head_reduction=self.head_reduction,
        )

    def filter_config(self) -> filters.FilterConfig:
        return filters.FilterConfig(
            degree_threshold=self.degree_threshold,
            min_distinct_pairs=self.min_distinct_pairs,
            require_contiguous=self.require_contiguous,
        )

    def validate(self) -> None:
        """Fail fast: every referenced input must exist and parse."""
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not record_partitions(self.records):
            raise FileNotFoundError(f"no record partitions at {self.records}")
        for name in ("dictionary", "vectors", "labels", "oracle"):
            path = getattr(self, name)
            if path is None or not Path(path).exists():
                raise FileNotFoundError(f"missing {name} file: {path}")
        link.load_mention_dictionary(self.dictionary)
        link.load_word_vectors(self.vectors)
        link.load_entity_labels(self.labels)
        load_oracle_tsv(self.oracle)
        if self.curation is not None:
            if not Path(self.curation).exists():
                raise FileNotFoundError(f"missing curation file: {self.curation}")
            relmap.load_curation_sheet(self.curation)
        if self.relmap_counts is not None and not Path(self.relmap_counts).exists():
            raise FileNotFoundError(f"missing relmap counts file: {self.relmap_counts}")

    def algorithmic_hash(self) -> str:
        """Hash of everything that can change pipeline output. Paths and
        worker count are excluded by design: they must not."""
        skip = {"records", "dictionary", "vectors", "labels", "oracle", "out",
                "curation", "relmap_counts", "workers"}
        fields = {k: v for k, v in dataclasses.asdict(self).items() if k not in skip}
        blob = json.dumps(fields, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()

    def echo(self) -> dict:
        return {
            k: str(v) if isinstance(v, Path) else v
            for k, v in dataclasses.asdict(self).items()
        }

    def algorithmic_echo(self) -> dict:
        """Config echo without paths or worker count: safe to embed in
        outputs that must be byte-identical across runs and directories."""
        skip = {"records", "dictionary", "vectors", "labels", "oracle", "out",
                "curation", "relmap_counts", "workers"}
        return {k: v for k, v in dataclasses.asdict(self).items() if k not in skip}


def record_partitions(records: str | Path) -> list[Path]:
    """A single .senrec.jsonl file, or every one inside a directory, sorted."""
    p = Path(records)
    if p.is_dir():
        return sorted(p.glob("*.senrec.jsonl"))
    return [p] if p.exists() else []


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _dump(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"), sort_keys=True)


def _write_jsonl(objs: Iterable[dict], path: Path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as f:
        for obj in objs:
            f.write(_dump(obj) + "\n")
            n += 1
    return n


def _read_jsonl(path: Path) -> list[dict]:
    with open(path, "r", encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def _pool_map(fn, tasks: Sequence, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


# --- match -------------------------------------------------------------------


def _match_partition(task: tuple) -> dict:
    in_path, out_path, cfg_fields = task
    match_cfg = MatchConfig(**cfg_fields)
    n_records = n_facts = 0
    errors: list[str] = []
    with open(out_path, "w", encoding="utf-8") as sink:
        for rec in read_records(in_path, on_error=lambda e: errors.append(str(e))):
            n_records += 1
            for fact in match_sentence(rec, match_cfg):
                sink.write(_dump(fact_to_obj(fact)) + "\n")
                n_facts += 1
    for msg in errors:
        log.warning("skipped record in %s: %s", in_path, msg)
    return {"records": n_records, "facts": n_facts, "record_errors": len(errors)}


def run_match(
    record_paths: Sequence[Path], outdir: Path, match_cfg: MatchConfig, workers: int
) -> tuple[list[Path], dict]:
    outdir.mkdir(parents=True, exist_ok=True)
    cfg_fields = dataclasses.asdict(match_cfg)
    tasks, outputs = [], []
    for i, part in enumerate(record_paths):
        out_path = outdir / f"part-{i:05d}.cand.jsonl"
        tasks.append((str(part), str(out_path), cfg_fields))
        outputs.append(out_path)
    stats = _pool_map(_match_partition, tasks, workers)
    totals = {k: sum(s[k] for s in stats) for k in ("records", "facts", "record_errors")}
    return outputs, totals


# --- stats / filter ----------------------------------------------------------


def _load_facts(path: Path) -> list[CandidateFact]:
    return [fact_from_obj(o) for o in _read_jsonl(path)]


def run_stats(candidate_paths: Sequence[Path], out_path: Path) -> filters.RelationStats:
    stats = filters.RelationStats()
    for path in candidate_paths:
        stats.merge(filters.collect_stats(_load_facts(path)))
    out_path.parent.mkdir(parents=True, exist_ok=True)
    filters.save_stats(stats, out_path)
    return stats


def run_filter(
    candidate_paths: Sequence[Path],
    stats: filters.RelationStats,
    cfg: filters.FilterConfig,
    outdir: Path,
) -> tuple[list[Path], dict]:
    outdir.mkdir(parents=True, exist_ok=True)
    kept_paths = []
    n_kept = n_rejected = 0
    for i, path in enumerate(candidate_paths):
        kept, rejected = filters.apply_filters(_load_facts(path), stats, cfg)
        kept_path = outdir / f"part-{i:05d}.kept.jsonl"
        _write_jsonl((fact_to_obj(f) for f in kept), kept_path)
        _write_jsonl(
            ({**fact_to_obj(f), "reason": reason} for f, reason in rejected),
            outdir / f"part-{i:05d}.rejected.jsonl",
        )
        kept_paths.append(kept_path)
        n_kept += len(kept)
        n_rejected += len(rejected)
    return kept_paths, {"kept": n_kept, "rejected": n_rejected}


# --- link --------------------------------------------------------------------


def _link_to_obj(el: link.EntityLink | None) -> dict | None:
    if el is None:
        return None
    return {
        "entity_id": el.entity_id,
        "prior": el.prior,
        "context_sim": el.context_sim,
        "score": el.score,
    }


def _link_partition(task: tuple) -> dict:
    records_path, kept_path, out_path, dict_path, vec_path, lab_path, tau = task
    dictionary = link.load_mention_dictionary(dict_path)
    vectors = link.load_word_vectors(vec_path)
    labels = link.load_entity_labels(lab_path)
    # bad records were already skipped (and logged) by the match stage
    by_key = {
        (r.doc_id, r.sent_id): r
        for r in read_records(records_path, on_error=lambda e: None)
    }
    rows = []
    n_links = 0
    for obj in _read_jsonl(Path(kept_path)):
        fact = fact_from_obj(obj)
        rec = by_key[(fact.doc_id, fact.sent_id)]
        hl = link.link_mention(fact.head, rec, dictionary, vectors, labels, tau)
        tl = link.link_mention(fact.tail, rec, dictionary, vectors, labels, tau)
        n_links += int(hl is not None) + int(tl is not None)
        rows.append({**obj, "head_link": _link_to_obj(hl), "tail_link": _link_to_obj(tl)})
    _write_jsonl(rows, Path(out_path))
    return {"facts": len(rows), "links": n_links}


def run_link(
    kept_paths: Sequence[Path],
    record_paths: Sequence[Path],
    outdir: Path,
    dictionary: Path,
    vectors: Path,
    labels: Path,
    tau: float,
    workers: int,
) -> tuple[list[Path], dict]:
    if len(kept_paths) != len(record_paths):
        raise ValueError(
            f"{len(kept_paths)} kept partitions vs {len(record_paths)} record partitions"
        )
    outdir.mkdir(parents=True, exist_ok=True)
    tasks, outputs = [], []
    for i, (rec_path, kept_path) in enumerate(zip(record_paths, kept_paths)):
        out_path = outdir / f"part-{i:05d}.linked.jsonl"
        tasks.append(
            (str(rec_path), str(kept_path), str(out_path),
             str(dictionary), str(vectors), str(labels), tau)
        )
        outputs.append(out_path)
    stats = _pool_map(_link_partition, tasks, workers)
    totals = {k: sum(s[k] for s in stats) for k in ("facts", "links")}
    return outputs, totals


# --- build-relmap / map ------------------------------------------------------


def run_build_relmap(
    linked_paths: Sequence[Path], oracle_path: Path, out_path: Path, per_pair: bool = False
) -> relmap.RelationMap:
    oracle = load_oracle_tsv(oracle_path)

    def rows():
        for path in linked_paths:
            for obj in _read_jsonl(path):
                fact = fact_from_obj(obj)
                hl, tl = obj.get("head_link"), obj.get("tail_link")
                yield (
                    hl["entity_id"] if hl else None,
                    tl["entity_id"] if tl else None,
                    relmap.normalize_phrase(fact.relation_tokens),
                )

    rm = relmap.build_relation_map(rows(), oracle, per_pair=per_pair)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    relmap.save_counts_tsv(rm, out_path)
    return rm


def run_map(
    linked_paths: Sequence[Path],
    counts_path: Path,
    curation_path: Path | None,
    outdir: Path,
) -> tuple[list[Path], dict]:
    rm = relmap.load_relation_map(counts_path, curation_path)
    outdir.mkdir(parents=True, exist_ok=True)
    outputs = []
    n_mapped = 0
    for i, path in enumerate(linked_paths):
        rows = []
        for obj in _read_jsonl(path):
            fact = fact_from_obj(obj)
            phrase = relmap.normalize_phrase(fact.relation_tokens)
            rel_kg = relmap.map_relation(phrase, rm)
            n_mapped += int(rel_kg is not None)
            rows.append({**obj, "relation_normalized": phrase, "relation_kg": rel_kg})
        out_path = outdir / f"part-{i:05d}.mapped.jsonl"
        _write_jsonl(rows, out_path)
        outputs.append(out_path)
    return outputs, {"relation_mapped": n_mapped}


# --- assemble / export / score -----------------------------------------------


def _open_facts(mapped_paths: Sequence[Path]) -> list[kg.OpenFact]:
    out = []
    for path in mapped_paths:
        for obj in _read_jsonl(path):
            fact = fact_from_obj(obj)
            hl, tl = obj.get("head_link"), obj.get("tail_link")
            head_entity = hl["entity_id"] if hl else None
            tail_entity = tl["entity_id"] if tl else None
            out.append(
                kg.OpenFact(
                    category=kg.classify(head_entity, obj["relation_kg"], tail_entity),
                    head_surface=fact.head_surface,
                    head_entity=head_entity,
                    relation_surface=fact.relation_surface,
                    relation_kg=obj["relation_kg"],
                    relation_normalized=obj["relation_normalized"],
                    tail_surface=fact.tail_surface,
                    tail_entity=tail_entity,
                    normalized_degree=fact.normalized_degree,
                    doc_id=fact.doc_id,
                    sent_id=fact.sent_id,
                )
            )
    return out


def run_assemble(mapped_paths: Sequence[Path], outdir: Path) -> tuple[kg.OpenKG, Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    graph = kg.assemble(_open_facts(mapped_paths))
    jsonl_path = outdir / "open_kg.okg.jsonl"
    kg.export(graph, "jsonl", jsonl_path)
    return graph, jsonl_path


def run_export(graph: kg.OpenKG, outdir: Path) -> list[Path]:
    outputs = []
    for fmt in ("tsv", "dot"):
        path = outdir / f"open_kg.okg.{fmt}"
        kg.export(graph, fmt, path)
        outputs.append(path)
    return outputs


def run_score(
    graph: kg.OpenKG,
    oracle_path: Path,
    out_path: Path,
    strict_precision: bool = False,
    config_echo: dict | None = None,
) -> scoring.ScoreReport:
    oracle = load_oracle_tsv(oracle_path)
    preds = [
        (f.head_entity, f.relation_kg, f.tail_entity) for f in graph.by_category[kg.MAPPED]
    ]
    report = scoring.score_slot_filling(preds, oracle, strict_precision=strict_precision)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"report": report.to_dict(), "config": config_echo or {}}
    out_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return report


# --- full pipeline -----------------------------------------------------------


def run_pipeline(config: PipelineConfig) -> dict:
    config.validate()
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    record_paths = record_partitions(config.records)

    manifest: dict = {
        "config": config.echo(),
        "config_sha256": config.algorithmic_hash(),
        "seed": config.seed,
        "inputs": {
            "records": [_sha256(p) for p in record_paths],
            "dictionary": _sha256(Path(config.dictionary)),
            "vectors": _sha256(Path(config.vectors)),
            "labels": _sha256(Path(config.labels)),
            "oracle": _sha256(Path(config.oracle)),
            "curation": _sha256(Path(config.curation)) if config.curation else None,
        },
        "stages": [],
        "checksums": {},
    }

    def finish(name: str, started: float, outputs: Sequence[Path], extra: dict):
        manifest["stages"].append(
            {"name": name, "seconds": round(time.perf_counter() - started, 6), **extra}
        )
        for path in outputs:
            manifest["checksums"][str(Path(path).relative_to(out))] = _sha256(Path(path))

    def run_stage(name: str, fn):
        log.info("stage %s", name)
        started = time.perf_counter()
        try:
            outputs, extra = fn()
        except Exception as e:
            raise StageError(name, e) from e
        finish(name, started, outputs, extra)

    state: dict = {}

    def do_match():
        paths, totals = run_match(record_paths, out / "match", config.match_config(), config.workers)
        state["cand"] = paths
        return paths, totals

    def do_stats():
        path = out / "stats" / "relation_stats.tsv"
        state["stats"] = run_stats(state["cand"], path)
        return [path], {"phrases": len(state["stats"])}

    def do_filter():
        kept, totals = run_filter(state["cand"], state["stats"], config.filter_config(), out / "filter")
        state["kept"] = kept
        rejected = sorted((out / "filter").glob("*.rejected.jsonl"))
        return list(kept) + rejected, totals

    def do_link():
        linked, totals = run_link(
            state["kept"], record_paths, out / "link",
            config.dictionary, config.vectors, config.labels,
            config.link_threshold, config.workers,
        )
        state["linked"] = linked
        return linked, totals

    def do_build_relmap():
        path = out / "relmap" / "counts.tsv"
        rm = run_build_relmap(state["linked"], Path(config.oracle), path, config.per_pair_counts)
        state["counts"] = path
        return [path], {"pairs": len(rm.counts)}

    def do_map():
        mapped, totals = run_map(state["linked"], state["counts"], config.curation, out / "map")
        state["mapped"] = mapped
        return mapped, totals

    def do_assemble():
        graph, path = run_assemble(state["mapped"], out / "kg")
        state["graph"] = graph
        extra = {"facts": len(graph)}
        extra.update({c: len(graph.by_category[c]) for c in kg.CATEGORIES})
        return [path], extra

    def do_export():
        return run_export(state["graph"], out / "kg"), {}

    def do_score():
        path = out / "score" / "report.json"
        report = run_score(
            state["graph"], Path(config.oracle), path,
            strict_precision=config.strict_precision,
            config_echo={**config.algorithmic_echo(), "config_sha256": config.algorithmic_hash()},
        )
        return [path], {"f1": report.f1}

    run_stage("match", do_match)
    run_stage("stats", do_stats)
    run_stage("filter", do_filter)
    run_stage("link", do_link)
    if config.relmap_counts is None:
        run_stage("build-relmap", do_build_relmap)
    else:
        state["counts"] = Path(config.relmap_counts)
    run_stage("map", do_map)
    run_stage("assemble", do_assemble)
    run_stage("export", do_export)
    run_stage("score", do_score)

    manifest_path = out / "manifest.json"
    manifest_path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest


# --- command line --------------------------------------------------------------


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    with open(path, "rb") as f:
        return tomllib.load(f)


_SETTING_DEFAULTS = {
    "beam_size": 6,
    "max_relation_len": 8,
    "normalize_by_length": True,
    "max_pair_token_gap": None,
    "head_reduction": "mean",
    "degree_threshold": 0.005,
    "min_distinct_pairs": 10,
    "require_contiguous": True,
    "link_threshold": 0.25,
    "per_pair_counts": False,
    "strict_precision": False,
    "workers": 1,
    "seed": 0,
}


def _settings(args: argparse.Namespace) -> dict:
    """Defaults, overridden by the config file, overridden by CLI flags."""
    merged = dict(_SETTING_DEFAULTS)
    file_cfg = _load_config_file(getattr(args, "config", None))
    unknown = set(file_cfg) - set(merged)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    merged.update(file_cfg)
    for key in merged:
        if isinstance(_SETTING_DEFAULTS[key], bool):
            continue  # boolean knobs use dedicated flags below
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    if getattr(args, "no_normalize_degree", False):
        merged["normalize_by_length"] = False
    if getattr(args, "no_require_contiguous", False):
        merged["require_contiguous"] = False
    if getattr(args, "per_pair", False) or getattr(args, "per_pair_counts", False):
        merged["per_pair_counts"] = True
    if getattr(args, "strict_precision", False):
        merged["strict_precision"] = True
    return merged


def _add_match_flags(p: argparse.ArgumentParser):
    p.add_argument("--beam-size", type=int, default=None)
    p.add_argument("--max-relation-len", type=int, default=None)
    p.add_argument("--no-normalize-degree", action="store_true",
                   help="rank and threshold on raw instead of length-normalized degrees")
    p.add_argument("--max-pair-token-gap", type=int, default=None)
    p.add_argument("--head-reduction", choices=("mean", "max"), default=None)


def _add_filter_flags(p: argparse.ArgumentParser):
    p.add_argument("--degree-threshold", type=float, default=None)
    p.add_argument("--min-distinct-pairs", type=int, default=None)
    p.add_argument("--no-require-contiguous", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mama-kg",
        description="Construct an open knowledge graph from LM attention records",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        p = sub.add_parser(name, **kw)
        p.add_argument("--config", help="TOML config file; flags override it")
        return p

    p = add("match", help="beam-search candidate facts per record partition")
    p.add_argument("--records", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=None)
    _add_match_flags(p)

    p = add("stats", help="aggregate distinct head-tail pairs per relation phrase")
    p.add_argument("--candidates", required=True, help="directory of .cand.jsonl files")
    p.add_argument("--out", required=True)

    p = add("filter", help="apply the degree/frequency/contiguity constraints")
    p.add_argument("--candidates", required=True)
    p.add_argument("--stats", required=True)
    p.add_argument("--out", required=True)
    _add_filter_flags(p)

    p = add("link", help="link head/tail mentions to oracle entities")
    p.add_argument("--kept", required=True, help="directory of .kept.jsonl files")
    p.add_argument("--records", required=True)
    p.add_argument("--dictionary", required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--link-threshold", type=float, default=None)
    p.add_argument("--workers", type=int, default=None)

    p = add("build-relmap", help="count phrase/KG-relation co-occurrences")
    p.add_argument("--linked", required=True)
    p.add_argument("--oracle", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--per-pair", action="store_true")

    p = add("rank", help="write the curation review sheet (top phrases per relation)")
    p.add_argument("--counts", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--top-n", type=int, default=15)

    p = add("map", help="map normalized phrases through the curated relation map")
    p.add_argument("--linked", required=True)
    p.add_argument("--counts", required=True)
    p.add_argument("--curation", default=None)
    p.add_argument("--out", required=True)

    p = add("assemble", help="deduplicate and categorize facts into the open KG")
    p.add_argument("--mapped", required=True)
    p.add_argument("--out", required=True)

    p = add("export", help="export an assembled KG as jsonl, tsv, or dot")
    p.add_argument("--kg", required=True)
    p.add_argument("--format", choices=("jsonl", "tsv", "dot"), required=True)
    p.add_argument("--out", required=True)

    p = add("score", help="slot-filling precision/recall/F1 against the oracle")
    p.add_argument("--kg", required=True)
    p.add_argument("--oracle", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--strict-precision", action="store_true")

    p = add("sample-review", help="seeded sample of facts as a manual review sheet")
    p.add_argument("--kg", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("-n", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--categories", nargs="*", choices=kg.CATEGORIES,
                   default=[kg.PARTIALLY_UNMAPPED, kg.COMPLETELY_UNMAPPED])

    p = add("run", help="run the whole pipeline and write a manifest")
    p.add_argument("--records", required=True)
    p.add_argument("--dictionary", required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--oracle", required=True)
    p.add_argument("--curation", default=None)
    p.add_argument("--relmap-counts", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--link-threshold", type=float, default=None)
    p.add_argument("--per-pair-counts", action="store_true")
    p.add_argument("--strict-precision", action="store_true")
    _add_match_flags(p)
    _add_filter_flags(p)

    return parser


def _match_cfg(s: dict) -> MatchConfig:
    return MatchConfig(
        beam_size=s["beam_size"],
        max_relation_len=s["max_relation_len"],
        normalize_by_length=s["normalize_by_length"],
        max_pair_token_gap=s["max_pair_token_gap"],
        head_reduction=s["head_reduction"],
    )


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("MAMA_KG_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)

    try:
        s = _settings(args)
        if args.command == "match":
            parts = record_partitions(args.records)
            if not parts:
                raise FileNotFoundError(f"no record partitions at {args.records}")
            outputs, totals = run_match(parts, Path(args.out), _match_cfg(s), s["workers"])
            print(json.dumps({"outputs": [str(p) for p in outputs], **totals}))

        elif args.command == "stats":
            paths = sorted(Path(args.candidates).glob("*.cand.jsonl"))
            stats = run_stats(paths, Path(args.out))
            print(json.dumps({"phrases": len(stats), "out": args.out}))

        elif args.command == "filter":
            paths = sorted(Path(args.candidates).glob("*.cand.jsonl"))
            stats = filters.load_stats(args.stats)
            fcfg = filters.FilterConfig(
                degree_threshold=s["degree_threshold"],
                min_distinct_pairs=s["min_distinct_pairs"],
                require_contiguous=s["require_contiguous"],
            )
            _, totals = run_filter(paths, stats, fcfg, Path(args.out))
            print(json.dumps(totals))

        elif args.command == "link":
            kept = sorted(Path(args.kept).glob("*.kept.jsonl"))
            _, totals = run_link(
                kept, record_partitions(args.records), Path(args.out),
                Path(args.dictionary), Path(args.vectors), Path(args.labels),
                s["link_threshold"], s["workers"],
            )
            print(json.dumps(totals))

        elif args.command == "build-relmap":
            linked = sorted(Path(args.linked).glob("*.linked.jsonl"))
            rm = run_build_relmap(
                linked, Path(args.oracle), Path(args.out), s["per_pair_counts"]
            )
            print(json.dumps({"pairs": len(rm.counts), "out": args.out}))

        elif args.command == "rank":
            rm = relmap.RelationMap(counts=relmap.load_counts_tsv(args.counts))
            rows = relmap.write_curation_sheet(rm, args.out, n=args.top_n)
            print(json.dumps({"rows": rows, "out": args.out}))

        elif args.command == "map":
            linked = sorted(Path(args.linked).glob("*.linked.jsonl"))
            _, totals = run_map(linked, Path(args.counts), args.curation, Path(args.out))
            print(json.dumps(totals))

        elif args.command == "assemble":
            mapped = sorted(Path(args.mapped).glob("*.mapped.jsonl"))
            graph, path = run_assemble(mapped, Path(args.out))
            print(json.dumps({"facts": len(graph), "out": str(path)}))

        elif args.command == "export":
            graph = kg.load_kg_jsonl(args.kg)
            n = kg.export(graph, args.format, args.out)
            print(json.dumps({"bytes": n, "out": args.out}))

        elif args.command == "score":
            graph = kg.load_kg_jsonl(args.kg)
            report = run_score(
                graph, Path(args.oracle), Path(args.out),
                strict_precision=s["strict_precision"],
            )
            print(json.dumps(report.to_dict()))

        elif args.command == "sample-review":
            graph = kg.load_kg_jsonl(args.kg)
            population = [f for f in graph.facts if f.category in set(args.categories)]
            rows = scoring.sample_for_review(population, args.n, s["seed"])
            scoring.write_review_sheet(rows, args.out)
            print(json.dumps({"rows": len(rows), "out": args.out}))

        elif args.command == "run":
            cfg = PipelineConfig(
                records=Path(args.records),
                dictionary=Path(args.dictionary),
                vectors=Path(args.vectors),
                labels=Path(args.labels),
                oracle=Path(args.oracle),
                curation=Path(args.curation) if args.curation else None,
                relmap_counts=Path(args.relmap_counts) if args.relmap_counts else None,
                out=Path(args.out),
                **{k: s[k] for k in _SETTING_DEFAULTS},
            )
            manifest = run_pipeline(cfg)
            print(json.dumps({
                "stages": [st["name"] for st in manifest["stages"]],
                "manifest": str(Path(args.out) / "manifest.json"),
            }))
    except (StageError, FileNotFoundError, ValueError, RecordError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
