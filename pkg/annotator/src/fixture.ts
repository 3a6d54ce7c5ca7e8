/** Deterministic one-record fixtures from hand-specified attention values,
 * for driving the consumer's tests with exact matrices. */

import { attentionPayload, recordToLine, validateRecord } from "./records.js";
import { FixtureSpec, SentenceRecord } from "./types.js";

export function makeFixture(spec: FixtureSpec): SentenceRecord {
    const t = spec.tokens.length;
    if (spec.attention.length !== t || spec.attention.some((row) => row.length !== t)) {
        throw new Error(
            `attention must be ${t}x${t} to match the token count, got ` +
                `${spec.attention.length}x${spec.attention[0]?.length ?? 0}`,
        );
    }
    let offset = 0;
    const tokens = spec.tokens.map((tok) => {
        const start = offset;
        offset += tok.text.length + 1;
        return { ...tok, char_start: start, char_end: start + tok.text.length };
    });
    const record: SentenceRecord = {
        doc_id: spec.doc_id ?? "fixture",
        sent_id: spec.sent_id ?? 0,
        text: spec.tokens.map((tok) => tok.text).join(" "),
        tokens,
        chunks: spec.chunks.map((c) => ({
            first_token: c.first_token,
            last_token: c.last_token,
            surface:
                c.surface ??
                spec.tokens
                    .slice(c.first_token, c.last_token + 1)
                    .map((tok) => tok.text)
                    .join(" "),
            ...(c.resolved_surface !== undefined ? { resolved_surface: c.resolved_surface } : {}),
        })),
        attention: attentionPayload(
            [spec.attention],
            spec.layer_spec ?? "last",
            spec.reduction_applied ?? "mean",
        ),
    };
    validateRecord(record);
    return record;
}

export function fixtureToLine(spec: FixtureSpec): string {
    return recordToLine(makeFixture(spec));
}
