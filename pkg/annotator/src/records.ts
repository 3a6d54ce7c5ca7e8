/** Serialization of sentence records into the .senrec.jsonl interchange
 * format: base64 of row-major little-endian float32 payloads, one JSON
 * object per line. */

import { AttentionPayload, LayerSpec, Reduction, SentenceRecord } from "./types.js";

export function encodeAttentionData(matrices: number[][][]): string {
    const t = matrices[0].length;
    const total = matrices.length * t * t;
    const buf = new ArrayBuffer(total * 4);
    const view = new DataView(buf);
    let off = 0;
    for (const m of matrices) {
        for (const row of m) {
            for (const v of row) {
                view.setFloat32(off, v, true);
                off += 4;
            }
        }
    }
    return Buffer.from(buf).toString("base64");
}

export function attentionPayload(
    matrices: number[][][],
    layer: LayerSpec,
    reduction: Reduction,
): AttentionPayload {
    const payload: AttentionPayload = {
        layout: reduction === "none" ? "per_head" : "reduced",
        dim: matrices[0].length,
        layer_spec: layer,
        reduction_applied: reduction,
        data_b64: encodeAttentionData(matrices),
    };
    if (reduction === "none") payload.num_heads = matrices.length;
    return payload;
}

/** Fixed key order keeps re-exports byte-identical. */
export function recordToLine(r: SentenceRecord): string {
    return JSON.stringify({
        doc_id: r.doc_id,
        sent_id: r.sent_id,
        text: r.text,
        tokens: r.tokens,
        chunks: r.chunks,
        attention: r.attention,
    });
}

const UPOS = new Set([
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X",
]);

/** Structural self-check mirroring the consumer's validator; the consumer
 * remains the authority. */
export function validateRecord(r: SentenceRecord): void {
    if (r.sent_id < 0) throw new Error("sent_id must be non-negative");
    let prevEnd = -1;
    for (const tok of r.tokens) {
        if (!UPOS.has(tok.pos)) throw new Error(`unknown POS ${tok.pos}`);
        if (!(tok.char_start < tok.char_end)) throw new Error("empty token span");
        if (tok.char_start < prevEnd) throw new Error("overlapping token spans");
        prevEnd = tok.char_end;
    }
    let prevLast = -1;
    for (const ch of r.chunks) {
        if (ch.first_token < 0 || ch.last_token >= r.tokens.length || ch.first_token > ch.last_token) {
            throw new Error("chunk span out of range");
        }
        if (ch.first_token <= prevLast) throw new Error("overlapping chunks");
        prevLast = ch.last_token;
    }
    if (r.attention.dim !== r.tokens.length) {
        throw new Error(`attention dim ${r.attention.dim} != token count ${r.tokens.length}`);
    }
    const expectPlanes = r.attention.layout === "per_head" ? r.attention.num_heads ?? 0 : 1;
    const bytes = Buffer.from(r.attention.data_b64, "base64");
    if (bytes.length !== expectPlanes * r.attention.dim * r.attention.dim * 4) {
        throw new Error("attention payload size mismatch");
    }
    for (let i = 0; i < bytes.length; i += 4) {
        if (bytes.readFloatLE(i) < 0) throw new Error("negative attention entry");
    }
}
