/** Layer selection, subword-to-word aggregation, and head reduction. */

import { Attentions } from "./model.js";
import { LayerSpec, Reduction } from "./types.js";

/** Per-head [H][T][T] view after layer selection. */
export function selectLayer(attentions: Attentions, layer: LayerSpec): number[][][] {
    if (layer === "last") return attentions[attentions.length - 1];
    const nLayers = attentions.length;
    const nHeads = attentions[0].length;
    const t = attentions[0][0].length;
    const out: number[][][] = [];
    for (let h = 0; h < nHeads; h++) {
        const m: number[][] = [];
        for (let i = 0; i < t; i++) {
            const row = new Array<number>(t).fill(0);
            for (let j = 0; j < t; j++) {
                let s = 0;
                for (let l = 0; l < nLayers; l++) s += attentions[l][h][i][j];
                row[j] = s / nLayers;
            }
            m.push(row);
        }
        out.push(m);
    }
    return out;
}

/** Sanity check on raw causal attention: every row sums to 1. */
export function checkRowSums(perHead: number[][][], tolerance = 1e-3): void {
    for (const head of perHead) {
        for (let i = 0; i < head.length; i++) {
            let s = 0;
            for (let j = 0; j < head.length; j++) s += head[i][j];
            if (Math.abs(s - 1) > tolerance) {
                throw new Error(`attention row ${i} sums to ${s}, expected 1`);
            }
        }
    }
}

/** Collapse subword positions to word level: the word-level weight is the
 * mean over the attending word's subword rows and the attended word's
 * subword columns. Aggregation never increases the maximum entry beyond the
 * pre-aggregation maximum times the largest group size (guarded). */
export function aggregateToWords(perHead: number[][][], owner: number[]): number[][][] {
    const nWords = owner.length ? owner[owner.length - 1] + 1 : 0;
    const groups: number[][] = Array.from({ length: nWords }, () => []);
    owner.forEach((w, pos) => groups[w].push(pos));
    const maxGroup = Math.max(1, ...groups.map((g) => g.length));

    return perHead.map((head) => {
        let preMax = 0;
        for (const row of head) for (const v of row) preMax = Math.max(preMax, v);
        const out: number[][] = [];
        for (let wi = 0; wi < nWords; wi++) {
            const row = new Array<number>(nWords).fill(0);
            for (let wj = 0; wj < nWords; wj++) {
                let s = 0;
                for (const si of groups[wi]) for (const sj of groups[wj]) s += head[si][sj];
                row[wj] = s / (groups[wi].length * groups[wj].length);
                if (row[wj] < 0 || row[wj] > preMax * maxGroup + 1e-12) {
                    throw new Error(`aggregated weight ${row[wj]} escapes the guard bound`);
                }
            }
            out.push(row);
        }
        return out;
    });
}

/** Reduce heads to a single matrix, or keep them (reduction "none"). */
export function reduceHeads(perHead: number[][][], reduction: Reduction): number[][][] {
    if (reduction === "none") return perHead;
    const nHeads = perHead.length;
    const t = perHead[0].length;
    const out: number[][] = [];
    for (let i = 0; i < t; i++) {
        const row = new Array<number>(t).fill(0);
        for (let j = 0; j < t; j++) {
            if (reduction === "mean") {
                let s = 0;
                for (let h = 0; h < nHeads; h++) s += perHead[h][i][j];
                row[j] = s / nHeads;
            } else {
                let m = -Infinity;
                for (let h = 0; h < nHeads; h++) m = Math.max(m, perHead[h][i][j]);
                row[j] = m;
            }
        }
        out.push(row);
    }
    return [out];
}
