/** Deterministic PRNG (splitmix32) so the bundled model's weights are the
 * same on every machine and run. */

export function splitmix32(seed: number): () => number {
    let state = seed >>> 0;
    return () => {
        state = (state + 0x9e3779b9) >>> 0;
        let z = state;
        z = Math.imul(z ^ (z >>> 16), 0x21f0aaad);
        z = Math.imul(z ^ (z >>> 15), 0x735a2d97);
        z = z ^ (z >>> 15);
        return (z >>> 0) / 4294967296;
    };
}

/** FNV-1a, used to hash subword strings onto the model's vocabulary. */
export function fnv1a(s: string): number {
    let h = 0x811c9dc5;
    for (let i = 0; i < s.length; i++) {
        h ^= s.charCodeAt(i);
        h = Math.imul(h, 0x01000193);
    }
    return h >>> 0;
}
