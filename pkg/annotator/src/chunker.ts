/** Noun-chunk detection over POS tags: maximal DET? (ADJ|NUM)* (NOUN|PROPN)+
 * runs, plus bare pronouns as single-token chunks (so coreference has a
 * mention to resolve). */

import { Tagged } from "./tagger.js";

export interface ChunkSpan {
    first: number;
    last: number; // inclusive
    surface: string;
    isPronoun: boolean;
}

const HEAD = new Set(["NOUN", "PROPN"]);
const MODIFIER = new Set(["ADJ", "NUM"]);

export function detectChunks(tokens: Tagged[]): ChunkSpan[] {
    const chunks: ChunkSpan[] = [];
    let i = 0;
    while (i < tokens.length) {
        if (tokens[i].pos === "PRON") {
            chunks.push({
                first: i,
                last: i,
                surface: tokens[i].text,
                isPronoun: true,
            });
            i += 1;
            continue;
        }
        let j = i;
        if (tokens[j].pos === "DET") j += 1;
        while (j < tokens.length && MODIFIER.has(tokens[j].pos)) j += 1;
        let headEnd = j;
        while (headEnd < tokens.length && HEAD.has(tokens[headEnd].pos)) headEnd += 1;
        if (headEnd > j) {
            const first = i;
            const last = headEnd - 1;
            chunks.push({
                first,
                last,
                surface: tokens.slice(first, last + 1).map((t) => t.text).join(" "),
                isPronoun: false,
            });
            i = headEnd;
        } else {
            i += 1;
        }
    }
    return chunks;
}
