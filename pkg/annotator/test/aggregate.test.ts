import { describe, expect, it } from "vitest";

import { aggregateToWords, checkRowSums, reduceHeads, selectLayer } from "../src/aggregate.js";
import { MiniCausalLM } from "../src/model.js";
import { subwordPlan, tokenize } from "../src/tokenizer.js";

function wordLevel(sentence: string, layer: "last" | "mean-all" = "last") {
    const { words } = tokenize(sentence);
    const { pieces, owner } = subwordPlan(words);
    const atts = new MiniCausalLM().forward(pieces);
    const perHead = selectLayer(atts, layer);
    return { perHead, owner, nWords: words.length };
}

describe("aggregation", () => {
    it("produces word-square matrices", () => {
        const { perHead, owner, nWords } = wordLevel("Dylan is a songwriter.");
        const agg = aggregateToWords(perHead, owner);
        expect(agg.length).toBe(perHead.length);
        expect(agg[0].length).toBe(nWords);
        expect(agg[0][0].length).toBe(nWords);
    });

    it("keeps entries non-negative and under the group-size bound", () => {
        const { perHead, owner } = wordLevel("Magnificent philosophers contemplate extraordinarily.");
        let preMax = 0;
        for (const h of perHead) for (const r of h) for (const v of r) preMax = Math.max(preMax, v);
        const maxGroup = 3; // longest word above splits into 3+ pieces
        const agg = aggregateToWords(perHead, owner);
        for (const h of agg) {
            for (const r of h) {
                for (const v of r) {
                    expect(v).toBeGreaterThanOrEqual(0);
                    expect(v).toBeLessThanOrEqual(preMax * Math.max(maxGroup, 4) + 1e-12);
                }
            }
        }
    });

    it("mean reduction stays within per-head bounds, max equals the loop", () => {
        const { perHead, owner } = wordLevel("Dylan is a songwriter.");
        const agg = aggregateToWords(perHead, owner);
        const mean = reduceHeads(agg, "mean")[0];
        const mx = reduceHeads(agg, "max")[0];
        const n = mean.length;
        for (let i = 0; i < n; i++) {
            for (let j = 0; j < n; j++) {
                const column = agg.map((h) => h[i][j]);
                expect(mean[i][j]).toBeGreaterThanOrEqual(Math.min(...column) - 1e-12);
                expect(mean[i][j]).toBeLessThanOrEqual(Math.max(...column) + 1e-12);
                expect(mx[i][j]).toBe(Math.max(...column));
            }
        }
    });

    it("reduction none keeps every head", () => {
        const { perHead, owner } = wordLevel("Dylan is a songwriter.");
        const agg = aggregateToWords(perHead, owner);
        expect(reduceHeads(agg, "none")).toBe(agg);
    });

    it("mean-all layer selection averages layers", () => {
        const sentence = "Dylan is a songwriter.";
        const { words } = tokenize(sentence);
        const { pieces } = subwordPlan(words);
        const atts = new MiniCausalLM().forward(pieces);
        const meanAll = selectLayer(atts, "mean-all");
        const manual =
            (atts[0][0][1][0] + atts[1][0][1][0]) / atts.length;
        expect(meanAll[0][1][0]).toBeCloseTo(manual, 12);
        checkRowSums(meanAll); // rows of a layer-average still sum to 1
    });

    it("row-sum check rejects broken matrices", () => {
        expect(() => checkRowSums([[[0.5, 0], [0, 0.5]]])).toThrow(/sums to/);
    });
});
