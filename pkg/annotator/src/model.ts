/** A miniature causal transformer with fixed, deterministically generated
 * weights, standing in for a downloadable pre-trained checkpoint (this
 * environment has no model hub access). The forward pass is the real thing:
 * token + sinusoidal position embeddings, per-layer multi-head scaled
 * dot-product attention with a causal mask and softmax rows, residual value
 * mixing between layers. Only attention weights are consumed downstream.
 */

import { fnv1a, splitmix32 } from "./rng.js";

export interface ModelConfig {
    vocabSize: number;
    dModel: number;
    nHeads: number;
    nLayers: number;
    seed: number;
}

export const DEFAULT_MODEL: ModelConfig = {
    vocabSize: 512,
    dModel: 32,
    nHeads: 4,
    nLayers: 2,
    seed: 0xa11ce,
};

/** Registered checkpoints; this build bundles exactly one. */
export const MODEL_REGISTRY: Record<string, ModelConfig> = {
    "mini-causal-v1": DEFAULT_MODEL,
};

export function loadModel(name: string): MiniCausalLM {
    const cfg = MODEL_REGISTRY[name];
    if (!cfg) {
        const known = Object.keys(MODEL_REGISTRY).join(", ");
        throw new Error(`unknown model "${name}" (bundled: ${known})`);
    }
    return new MiniCausalLM(cfg);
}

/** attentions[layer][head][i][j]: token i attending to token j (j <= i). */
export type Attentions = number[][][][];

export class MiniCausalLM {
    readonly cfg: ModelConfig;
    private embedding: Float64Array; // [vocab, d]
    private wq: Float64Array[]; // per layer [d, d]
    private wk: Float64Array[];
    private wv: Float64Array[];
    private wo: Float64Array[];

    constructor(cfg: ModelConfig = DEFAULT_MODEL) {
        this.cfg = cfg;
        const rand = splitmix32(cfg.seed);
        const init = (n: number, scale: number) => {
            const a = new Float64Array(n);
            for (let i = 0; i < n; i++) a[i] = (rand() * 2 - 1) * scale;
            return a;
        };
        const d = cfg.dModel;
        const scale = 1 / Math.sqrt(d);
        this.embedding = init(cfg.vocabSize * d, 1.0);
        this.wq = [];
        this.wk = [];
        this.wv = [];
        this.wo = [];
        for (let l = 0; l < cfg.nLayers; l++) {
            this.wq.push(init(d * d, scale));
            this.wk.push(init(d * d, scale));
            this.wv.push(init(d * d, scale));
            this.wo.push(init(d * d, scale));
        }
    }

    tokenId(piece: string): number {
        return fnv1a(piece) % this.cfg.vocabSize;
    }

    /** Forward pass over subword pieces; returns per-layer per-head causal
     * attention matrices (each row a softmax over positions 0..i). */
    forward(pieces: string[]): Attentions {
        const { dModel: d, nHeads, nLayers } = this.cfg;
        const t = pieces.length;
        const dHead = d / nHeads;
        let x = new Float64Array(t * d);
        for (let i = 0; i < t; i++) {
            const id = this.tokenId(pieces[i]);
            for (let c = 0; c < d; c++) {
                const pos =
                    c % 2 === 0
                        ? Math.sin(i / Math.pow(10000, c / d))
                        : Math.cos(i / Math.pow(10000, (c - 1) / d));
                x[i * d + c] = this.embedding[id * d + c] + pos;
            }
        }

        const attentions: Attentions = [];
        for (let l = 0; l < nLayers; l++) {
            const q = matmul(x, this.wq[l], t, d, d);
            const k = matmul(x, this.wk[l], t, d, d);
            const v = matmul(x, this.wv[l], t, d, d);
            const layerHeads: number[][][] = [];
            const mixed = new Float64Array(t * d);
            for (let h = 0; h < nHeads; h++) {
                const off = h * dHead;
                const att: number[][] = [];
                for (let i = 0; i < t; i++) {
                    const row = new Array<number>(t).fill(0);
                    let maxScore = -Infinity;
                    const scores = new Float64Array(i + 1);
                    for (let j = 0; j <= i; j++) {
                        let s = 0;
                        for (let c = 0; c < dHead; c++) {
                            s += q[i * d + off + c] * k[j * d + off + c];
                        }
                        s /= Math.sqrt(dHead);
                        scores[j] = s;
                        if (s > maxScore) maxScore = s;
                    }
                    let z = 0;
                    for (let j = 0; j <= i; j++) {
                        scores[j] = Math.exp(scores[j] - maxScore);
                        z += scores[j];
                    }
                    for (let j = 0; j <= i; j++) {
                        row[j] = scores[j] / z;
                        for (let c = 0; c < dHead; c++) {
                            mixed[i * d + off + c] += row[j] * v[j * d + off + c];
                        }
                    }
                    att.push(row);
                }
                layerHeads.push(att);
            }
            attentions.push(layerHeads);
            const out = matmul(mixed, this.wo[l], t, d, d);
            for (let i = 0; i < t * d; i++) x[i] += out[i];
        }
        return attentions;
    }
}

function matmul(a: Float64Array, b: Float64Array, n: number, k: number, m: number): Float64Array {
    const out = new Float64Array(n * m);
    for (let i = 0; i < n; i++) {
        for (let p = 0; p < k; p++) {
            const av = a[i * k + p];
            if (av === 0) continue;
            for (let j = 0; j < m; j++) {
                out[i * m + j] += av * b[p * m + j];
            }
        }
    }
    return out;
}
