import { describe, expect, it } from "vitest";

import { tagSentence } from "../src/tagger.js";
import { tokenize } from "../src/tokenizer.js";

function tag(sentence: string) {
    return tagSentence(tokenize(sentence).words);
}

describe("tagSentence", () => {
    it("tags the walkthrough sentence", () => {
        const tags = tag("Dylan is a songwriter.");
        expect(tags.map((t) => t.pos)).toEqual(["PROPN", "AUX", "DET", "NOUN", "PUNCT"]);
        expect(tags.map((t) => t.lemma)).toEqual(["dylan", "be", "a", "songwriter", "."]);
    });

    it("lemmatizes irregular and suffixed verbs", () => {
        expect(tag("He wrote songs.")[1]).toMatchObject({ pos: "VERB", lemma: "write" });
        expect(tag("She married him.")[1]).toMatchObject({ pos: "VERB", lemma: "marry" });
        expect(tag("They lived there.")[1]).toMatchObject({ pos: "VERB", lemma: "live" });
        expect(tag("Anna was born in Oslo.")[2]).toMatchObject({ pos: "VERB", lemma: "bear" });
    });

    it("tags pronouns, adpositions, and plural nouns", () => {
        const tags = tag("She sang with friends.");
        expect(tags.map((t) => t.pos)).toEqual(["PRON", "VERB", "ADP", "NOUN", "PUNCT"]);
        expect(tags[3].lemma).toBe("friend");
    });

    it("treats mid-sentence capitalized words as proper nouns", () => {
        const tags = tag("He visited Green Belt Movement.");
        expect(tags.slice(2, 5).map((t) => t.pos)).toEqual(["PROPN", "PROPN", "PROPN"]);
    });

    it("only emits universal POS tags", () => {
        const upos = new Set([
            "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
            "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X",
        ]);
        for (const t of tag("Marie Curie studied radiation in Paris, and she won 2 prizes quickly.")) {
            expect(upos.has(t.pos), `${t.text} -> ${t.pos}`).toBe(true);
        }
    });
});
