/** The exporter pipeline: raw documents in, .senrec.jsonl records out.
 * One LM forward pass per sentence (no fine-tuning); subword attention is
 * aggregated to word level before writing. */

import { aggregateToWords, checkRowSums, reduceHeads, selectLayer } from "./aggregate.js";
import { ChunkSpan, detectChunks } from "./chunker.js";
import { resolvePronouns, SentenceChunks } from "./coref.js";
import { loadModel, MiniCausalLM } from "./model.js";
import { attentionPayload, validateRecord } from "./records.js";
import { Tagged, tagSentence } from "./tagger.js";
import { splitSentences, subwordPlan, tokenize, Word } from "./tokenizer.js";
import { ExportConfig, RawDocument, SentenceRecord, TokenAnnotation } from "./types.js";

export interface AnnotateResult {
    records: SentenceRecord[];
    skippedTooLong: number;
}

function toAnnotations(words: Word[], tagged: Tagged[]): TokenAnnotation[] {
    return words.map((w, i) => ({
        text: w.text,
        lemma: tagged[i].lemma,
        pos: tagged[i].pos,
        char_start: w.start,
        char_end: w.end,
    }));
}

export function annotateDocuments(
    docs: RawDocument[],
    cfg: ExportConfig,
    model?: MiniCausalLM,
): AnnotateResult {
    const lm = model ?? loadModel(cfg.model);
    const records: SentenceRecord[] = [];
    let skippedTooLong = 0;

    for (const doc of docs) {
        interface Prepared {
            text: string;
            words: Word[];
            tagged: Tagged[];
            chunks: ChunkSpan[];
        }
        const prepared: Prepared[] = [];
        for (const sentence of splitSentences(doc.text)) {
            const { text, words } = tokenize(sentence);
            if (words.length === 0) continue;
            const tagged = tagSentence(words);
            prepared.push({ text, words, tagged, chunks: detectChunks(tagged) });
        }

        const forCoref: SentenceChunks[] = prepared.map((p) => ({
            tokens: p.tagged,
            chunks: p.chunks,
        }));
        const resolutions = cfg.coref
            ? resolvePronouns(forCoref)
            : prepared.map(() => new Map<number, string>());

        let sentId = 0;
        prepared.forEach((p, si) => {
            const { pieces, owner } = subwordPlan(p.words);
            if (pieces.length > cfg.maxSeqLen) {
                skippedTooLong += 1;
                return;
            }
            const attentions = lm.forward(pieces);
            const perHead = selectLayer(attentions, cfg.layer);
            checkRowSums(perHead); // softmax rows must sum to 1 pre-aggregation
            const wordLevel = aggregateToWords(perHead, owner);
            const matrices = reduceHeads(wordLevel, cfg.reduction);

            const record: SentenceRecord = {
                doc_id: doc.doc_id,
                sent_id: sentId,
                text: p.text,
                tokens: toAnnotations(p.words, p.tagged),
                chunks: p.chunks.map((c, ci) => {
                    const resolved = resolutions[si].get(ci);
                    return {
                        first_token: c.first,
                        last_token: c.last,
                        surface: c.surface,
                        ...(resolved !== undefined ? { resolved_surface: resolved } : {}),
                    };
                }),
                attention: attentionPayload(matrices, cfg.layer, cfg.reduction),
            };
            validateRecord(record);
            records.push(record);
            sentId += 1;
        });
    }
    return { records, skippedTooLong };
}
