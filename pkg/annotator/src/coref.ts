/** Minimal pronoun coreference: a pronoun chunk resolves to the most recent
 * proper-noun-headed chunk earlier in the document. Only fills
 * resolved_surface; never rewrites text or token indices. */

import { ChunkSpan } from "./chunker.js";
import { Tagged } from "./tagger.js";

export interface SentenceChunks {
    tokens: Tagged[];
    chunks: ChunkSpan[];
}

const RESOLVABLE = new Set(["he", "she", "it", "they", "him", "her", "them"]);

/** Returns, per sentence, a map chunk-index -> resolved surface. */
export function resolvePronouns(sentences: SentenceChunks[]): Array<Map<number, string>> {
    const resolutions: Array<Map<number, string>> = [];
    let lastProper: string | null = null;
    for (const sent of sentences) {
        const resolved = new Map<number, string>();
        sent.chunks.forEach((chunk, ci) => {
            if (chunk.isPronoun) {
                const lower = chunk.surface.toLowerCase();
                if (RESOLVABLE.has(lower) && lastProper !== null) {
                    resolved.set(ci, lastProper);
                }
            } else if (sent.tokens[chunk.last].pos === "PROPN") {
                lastProper = chunk.surface;
            }
        });
        resolutions.push(resolved);
    }
    return resolutions;
}
