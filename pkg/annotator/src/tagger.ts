/** Rule-and-lexicon POS tagging and lemmatization over Universal POS tags.
 * Deliberately small: closed-class lexicons, an irregular-form table, and
 * suffix morphology, which covers controlled corpora; swap in a statistical
 * tagger upstream if broader text is needed. */

import { Word } from "./tokenizer.js";

const DETERMINERS = new Set(["a", "an", "the", "this", "that", "these", "those"]);
const AUXILIARIES = new Set([
    "is", "am", "are", "was", "were", "be", "been", "being",
    "has", "have", "had", "do", "does", "did",
    "will", "would", "can", "could", "shall", "should", "may", "might", "must",
]);
const ADPOSITIONS = new Set([
    "in", "on", "at", "of", "for", "with", "from", "by", "to", "into",
    "near", "across", "over", "under", "about", "through", "during",
]);
const PRONOUNS = new Set([
    "he", "she", "it", "they", "him", "her", "them", "his", "hers", "its",
    "their", "theirs", "i", "we", "you", "me", "us", "who", "whom",
]);
const CCONJ = new Set(["and", "or", "but", "nor"]);
const SCONJ = new Set(["because", "while", "although", "if", "when", "since", "that"]);
const ADVERBS = new Set([
    "very", "never", "often", "later", "early", "recently", "soon",
    "now", "then", "here", "there", "also", "not",
]);
const ADJECTIVES = new Set([
    "young", "old", "new", "famous", "registered", "american", "british",
    "small", "large", "early", "late", "first", "second", "best", "great",
]);
const PARTICLES = new Set(["'s", "n't", "'"]);

/** verb surface form -> lemma; shared by tagging and lemmatization */
const IRREGULAR_VERBS: Record<string, string> = {
    born: "bear", wrote: "write", written: "write", won: "win", made: "make",
    met: "meet", left: "leave", held: "hold", sang: "sing", sung: "sing",
    began: "begin", grew: "grow", took: "take", gave: "give", went: "go",
    became: "become", led: "lead", built: "build", taught: "teach",
    bought: "buy", sold: "sell", told: "tell", said: "say", saw: "see",
    came: "come", ran: "run", spoke: "speak", sat: "sit", stood: "stand",
};
const VERB_STEMS = new Set([
    "sign", "marry", "live", "move", "attend", "found", "play", "sing",
    "tour", "record", "release", "join", "study", "work", "direct", "paint",
    "compose", "perform", "produce", "publish", "die", "retire", "write",
    "win", "lead", "own", "visit", "meet", "teach", "start", "remain",
    "create", "design",
]);
const NOUN_IRREGULAR: Record<string, string> = {
    children: "child", men: "man", women: "woman", people: "person",
};

const PUNCT = /^[^A-Za-z0-9]+$/;
const NUMERIC = /^[0-9]/;

function isCapitalized(text: string): boolean {
    return /^[A-Z]/.test(text);
}

function stripVerbSuffix(lower: string): string | null {
    if (lower.endsWith("ies") && lower.length > 4) return lower.slice(0, -3) + "y";
    if (lower.endsWith("ied") && lower.length > 4) return lower.slice(0, -3) + "y";
    if (lower.endsWith("ing") && lower.length > 4) {
        const stem = lower.slice(0, -3);
        if (VERB_STEMS.has(stem)) return stem;
        if (VERB_STEMS.has(stem + "e")) return stem + "e";
        if (stem.length > 2 && stem[stem.length - 1] === stem[stem.length - 2]) {
            const undoubled = stem.slice(0, -1);
            if (VERB_STEMS.has(undoubled)) return undoubled;
        }
        return null;
    }
    if (lower.endsWith("ed") && lower.length > 3) {
        const stem = lower.slice(0, -2);
        if (VERB_STEMS.has(stem)) return stem;
        if (VERB_STEMS.has(stem + "e") || stem.endsWith("i") || stem.endsWith("u")) {
            return VERB_STEMS.has(stem + "e") ? stem + "e" : stem;
        }
        if (stem.length > 2 && stem[stem.length - 1] === stem[stem.length - 2]) {
            const undoubled = stem.slice(0, -1);
            if (VERB_STEMS.has(undoubled)) return undoubled;
        }
        return stem;
    }
    if (lower.endsWith("s") && !lower.endsWith("ss") && lower.length > 2) {
        const stem = lower.slice(0, -1);
        if (VERB_STEMS.has(stem)) return stem;
    }
    return null;
}

function singularize(lower: string): string {
    if (NOUN_IRREGULAR[lower]) return NOUN_IRREGULAR[lower];
    if (lower.endsWith("ies") && lower.length > 4) return lower.slice(0, -3) + "y";
    if (lower.endsWith("ses") || lower.endsWith("xes") || lower.endsWith("zes")) {
        return lower.slice(0, -2);
    }
    if (lower.endsWith("s") && !lower.endsWith("ss") && lower.length > 3) {
        return lower.slice(0, -1);
    }
    return lower;
}

export interface Tagged {
    text: string;
    lemma: string;
    pos: string;
}

/** Tag one sentence's words. Position matters only for the sentence-initial
 * capitalization heuristic. */
export function tagSentence(words: Word[]): Tagged[] {
    return words.map((w, i) => {
        const text = w.text;
        const lower = text.toLowerCase();

        if (PUNCT.test(text)) {
            return PARTICLES.has(lower)
                ? { text, lemma: lower, pos: "PART" }
                : { text, lemma: text, pos: "PUNCT" };
        }
        if (NUMERIC.test(text)) return { text, lemma: lower, pos: "NUM" };
        if (PARTICLES.has(lower)) return { text, lemma: lower, pos: "PART" };
        if (DETERMINERS.has(lower)) return { text, lemma: lower, pos: "DET" };
        if (AUXILIARIES.has(lower)) {
            const lemma = ["is", "am", "are", "was", "were", "been", "being"].includes(lower)
                ? "be"
                : ["has", "had"].includes(lower)
                  ? "have"
                  : ["does", "did"].includes(lower)
                    ? "do"
                    : lower;
            return { text, lemma, pos: "AUX" };
        }
        if (ADPOSITIONS.has(lower)) return { text, lemma: lower, pos: "ADP" };
        if (PRONOUNS.has(lower)) return { text, lemma: lower, pos: "PRON" };
        if (CCONJ.has(lower)) return { text, lemma: lower, pos: "CCONJ" };
        if (SCONJ.has(lower)) return { text, lemma: lower, pos: "SCONJ" };
        if (ADJECTIVES.has(lower)) return { text, lemma: lower, pos: "ADJ" };
        if (ADVERBS.has(lower) || (lower.endsWith("ly") && lower.length > 4)) {
            return { text, lemma: lower, pos: "ADV" };
        }
        if (IRREGULAR_VERBS[lower]) {
            return { text, lemma: IRREGULAR_VERBS[lower], pos: "VERB" };
        }
        if (VERB_STEMS.has(lower)) return { text, lemma: lower, pos: "VERB" };
        const verbLemma = stripVerbSuffix(lower);
        if (verbLemma !== null) return { text, lemma: verbLemma, pos: "VERB" };
        if (isCapitalized(text) && i > 0) return { text, lemma: lower, pos: "PROPN" };
        if (isCapitalized(text) && i === 0) {
            // sentence-initial capitals are proper nouns unless clearly common
            return { text, lemma: lower, pos: "PROPN" };
        }
        return { text, lemma: singularize(lower), pos: "NOUN" };
    });
}
