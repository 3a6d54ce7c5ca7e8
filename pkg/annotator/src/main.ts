#!/usr/bin/env node
/** CLI: `annotate` turns raw text into .senrec.jsonl partitions;
 * `make-fixture` writes a one-record file from an explicit spec. */

import { mkdirSync, readdirSync, readFileSync, statSync, writeFileSync } from "node:fs";
import { basename, extname, join } from "node:path";
import { parseArgs } from "node:util";

import { annotateDocuments } from "./annotate.js";
import { fixtureToLine } from "./fixture.js";
import { recordToLine } from "./records.js";
import { DEFAULT_CONFIG, ExportConfig, FixtureSpec, RawDocument } from "./types.js";

function readDocuments(input: string): RawDocument[] {
    const stat = statSync(input);
    if (stat.isDirectory()) {
        return readdirSync(input)
            .filter((f) => f.endsWith(".txt"))
            .sort()
            .map((f) => ({
                doc_id: basename(f, extname(f)),
                text: readFileSync(join(input, f), "utf-8"),
            }));
    }
    return readFileSync(input, "utf-8")
        .split("\n")
        .filter((line) => line.trim())
        .map((line) => {
            const obj = JSON.parse(line);
            if (typeof obj.doc_id !== "string" || typeof obj.text !== "string") {
                throw new Error("each JSONL document needs doc_id and text strings");
            }
            return { doc_id: obj.doc_id, text: obj.text };
        });
}

function annotateCommand(argv: string[]): number {
    const { values } = parseArgs({
        args: argv,
        options: {
            input: { type: "string" },
            out: { type: "string" },
            model: { type: "string", default: DEFAULT_CONFIG.model },
            layer: { type: "string", default: DEFAULT_CONFIG.layer },
            reduction: { type: "string", default: DEFAULT_CONFIG.reduction },
            "max-seq-len": { type: "string", default: String(DEFAULT_CONFIG.maxSeqLen) },
            "batch-size": { type: "string", default: String(DEFAULT_CONFIG.batchSize) },
            coref: { type: "boolean", default: false },
            partitions: { type: "string", default: "1" },
        },
    });
    if (!values.input || !values.out) {
        console.error("usage: annotate --input <jsonl|dir> --out <dir> [--model NAME]" +
            " [--layer last|mean-all] [--reduction mean|max|none] [--max-seq-len N]" +
            " [--coref] [--partitions N]");
        return 2;
    }
    const cfg: ExportConfig = {
        model: values.model!,
        layer: values.layer as ExportConfig["layer"],
        reduction: values.reduction as ExportConfig["reduction"],
        maxSeqLen: parseInt(values["max-seq-len"]!, 10),
        batchSize: parseInt(values["batch-size"]!, 10),
        coref: Boolean(values.coref),
    };
    if (!["last", "mean-all"].includes(cfg.layer)) throw new Error(`bad layer ${cfg.layer}`);
    if (!["mean", "max", "none"].includes(cfg.reduction)) {
        throw new Error(`bad reduction ${cfg.reduction}`);
    }

    const docs = readDocuments(values.input);
    const { records, skippedTooLong } = annotateDocuments(docs, cfg);

    const nParts = Math.max(1, parseInt(values.partitions!, 10));
    const docIndex = new Map<string, number>();
    docs.forEach((d, i) => docIndex.set(d.doc_id, i));
    mkdirSync(values.out, { recursive: true });
    for (let p = 0; p < nParts; p++) {
        const lines = records
            .filter((r) => docIndex.get(r.doc_id)! % nParts === p)
            .map(recordToLine);
        writeFileSync(
            join(values.out, `part-${String(p).padStart(5, "0")}.senrec.jsonl`),
            lines.map((l) => l + "\n").join(""),
        );
    }
    console.log(
        JSON.stringify({
            documents: docs.length,
            records: records.length,
            skipped_too_long: skippedTooLong,
            partitions: nParts,
            out: values.out,
        }),
    );
    return 0;
}

function makeFixtureCommand(argv: string[]): number {
    const { values } = parseArgs({
        args: argv,
        options: { spec: { type: "string" }, out: { type: "string" } },
    });
    if (!values.spec || !values.out) {
        console.error("usage: make-fixture --spec <spec.json> --out <file.senrec.jsonl>");
        return 2;
    }
    const spec = JSON.parse(readFileSync(values.spec, "utf-8")) as FixtureSpec;
    writeFileSync(values.out, fixtureToLine(spec) + "\n");
    console.log(JSON.stringify({ out: values.out }));
    return 0;
}

export function main(argv: string[]): number {
    const [command, ...rest] = argv;
    try {
        if (command === "annotate") return annotateCommand(rest);
        if (command === "make-fixture") return makeFixtureCommand(rest);
        console.error("usage: senrec-annotate <annotate|make-fixture> ...");
        return 2;
    } catch (err) {
        console.error(`error: ${err instanceof Error ? err.message : err}`);
        return 1;
    }
}

const isEntry = process.argv[1] && import.meta.url.endsWith(basename(process.argv[1]));
if (isEntry) {
    process.exit(main(process.argv.slice(2)));
}
