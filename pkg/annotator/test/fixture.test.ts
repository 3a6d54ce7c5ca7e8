import { describe, expect, it } from "vitest";

import { fixtureToLine, makeFixture } from "../src/fixture.js";
import { FixtureSpec } from "../src/types.js";

const WALKTHROUGH: FixtureSpec = {
    doc_id: "walkthrough",
    tokens: [
        { text: "Dylan", lemma: "dylan", pos: "PROPN" },
        { text: "is", lemma: "be", pos: "AUX" },
        { text: "a", lemma: "a", pos: "DET" },
        { text: "songwriter", lemma: "songwriter", pos: "NOUN" },
        { text: ".", lemma: ".", pos: "PUNCT" },
    ],
    chunks: [
        { first_token: 0, last_token: 0 },
        { first_token: 3, last_token: 3 },
    ],
    attention: [
        [0, 0, 0, 0, 0],
        [0.3, 0, 0, 0, 0],
        [0.1, 0, 0, 0, 0],
        [0, 0.4, 0.2, 0, 0],
        [0, 0, 0, 0, 0],
    ],
};

describe("makeFixture", () => {
    it("encodes the walkthrough attention bit-exactly", () => {
        const rec = makeFixture(WALKTHROUGH);
        const bytes = Buffer.from(rec.attention.data_b64, "base64");
        expect(bytes.length).toBe(25 * 4);
        expect(bytes.readFloatLE((1 * 5 + 0) * 4)).toBeCloseTo(0.3, 7);
        expect(bytes.readFloatLE((3 * 5 + 1) * 4)).toBeCloseTo(0.4, 7);
        expect(bytes.readFloatLE((1 * 5 + 0) * 4)).toBe(Math.fround(0.3));
    });

    it("derives offsets, text, and chunk surfaces", () => {
        const rec = makeFixture(WALKTHROUGH);
        expect(rec.text).toBe("Dylan is a songwriter .");
        expect(rec.chunks[1].surface).toBe("songwriter");
        for (const tok of rec.tokens) {
            expect(rec.text.slice(tok.char_start, tok.char_end)).toBe(tok.text);
        }
    });

    it("accepts an identity matrix", () => {
        const eye = [
            [1, 0],
            [0, 1],
        ];
        const rec = makeFixture({
            tokens: [
                { text: "a", lemma: "a", pos: "NOUN" },
                { text: "b", lemma: "b", pos: "NOUN" },
            ],
            chunks: [],
            attention: eye,
        });
        expect(rec.attention.dim).toBe(2);
    });

    it("rejects non-square attention", () => {
        expect(() =>
            makeFixture({ ...WALKTHROUGH, attention: [[0, 1], [1, 0]] }),
        ).toThrow(/5x5/);
    });

    it("emits one JSON line", () => {
        const line = fixtureToLine(WALKTHROUGH);
        expect(line).not.toContain("\n");
        expect(JSON.parse(line).doc_id).toBe("walkthrough");
    });
});
