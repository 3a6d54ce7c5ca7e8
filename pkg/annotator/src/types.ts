/** Shapes of the .senrec.jsonl interchange format and exporter config. */

export interface TokenAnnotation {
    text: string;
    lemma: string;
    pos: string;
    char_start: number;
    char_end: number;
}

export interface NounChunk {
    first_token: number;
    last_token: number;
    surface: string;
    resolved_surface?: string;
}

export type Layout = "reduced" | "per_head";
export type Reduction = "none" | "mean" | "max";
export type LayerSpec = "last" | "mean-all";

export interface AttentionPayload {
    layout: Layout;
    num_heads?: number;
    dim: number;
    layer_spec: LayerSpec;
    reduction_applied: Reduction;
    data_b64: string;
}

export interface SentenceRecord {
    doc_id: string;
    sent_id: number;
    text: string;
    tokens: TokenAnnotation[];
    chunks: NounChunk[];
    attention: AttentionPayload;
}

export interface ExportConfig {
    model: string;
    layer: LayerSpec;
    reduction: Reduction;
    maxSeqLen: number; // subword budget per sentence; longer sentences are skipped
    batchSize: number;
    coref: boolean;
}

export const DEFAULT_CONFIG: ExportConfig = {
    model: "mini-causal-v1",
    layer: "last",
    reduction: "mean",
    maxSeqLen: 256,
    batchSize: 8,
    coref: false,
};

/** Hand-specified one-record fixture: explicit tokens and attention values. */
export interface FixtureSpec {
    doc_id?: string;
    sent_id?: number;
    tokens: Array<{ text: string; lemma: string; pos: string }>;
    chunks: Array<{
        first_token: number;
        last_token: number;
        surface?: string;
        resolved_surface?: string;
    }>;
    attention: number[][];
    layer_spec?: LayerSpec;
    reduction_applied?: Reduction;
}

export interface RawDocument {
    doc_id: string;
    text: string;
}
