/** Sentence segmentation, word tokenization with character offsets, and the
 * subword split used for model input. */

export interface Word {
    text: string;
    start: number;
    end: number; // exclusive
}

export interface Sentence {
    text: string;
    words: Word[];
}

const SENTENCE_BREAK = /[.!?]+(?=\s|$)/g;
const WORD = /[A-Za-z]+(?:'[A-Za-z]+)?|[0-9]+(?:\.[0-9]+)?|[^\sA-Za-z0-9]/g;

/** Split a document into sentences on terminal punctuation, keeping the
 * punctuation with its sentence. */
export function splitSentences(text: string): string[] {
    const out: string[] = [];
    let last = 0;
    for (const m of text.matchAll(SENTENCE_BREAK)) {
        const end = m.index! + m[0].length;
        const piece = text.slice(last, end).trim();
        if (piece) out.push(piece);
        last = end;
    }
    const tail = text.slice(last).trim();
    if (tail) out.push(tail);
    return out;
}

/** Tokenize one sentence; offsets index into the sentence text. */
export function tokenize(sentence: string): Sentence {
    const words: Word[] = [];
    for (const m of sentence.matchAll(WORD)) {
        words.push({ text: m[0], start: m.index!, end: m.index! + m[0].length });
    }
    return { text: sentence, words };
}

const SUBWORD_MAX = 4;

/** Deterministic subword split: lowercase chunks of at most four characters.
 * Every word maps to at least one subword; punctuation stays whole. */
export function subwords(word: string): string[] {
    const lower = word.toLowerCase();
    if (lower.length <= SUBWORD_MAX) return [lower];
    const parts: string[] = [];
    for (let i = 0; i < lower.length; i += SUBWORD_MAX) {
        parts.push(lower.slice(i, i + SUBWORD_MAX));
    }
    return parts;
}

/** Subword ids per word for a whole sentence, plus the word index owning
 * each subword position. */
export function subwordPlan(words: Word[]): { pieces: string[]; owner: number[] } {
    const pieces: string[] = [];
    const owner: number[] = [];
    words.forEach((w, wi) => {
        for (const p of subwords(w.text)) {
            pieces.push(p);
            owner.push(wi);
        }
    });
    return { pieces, owner };
}
